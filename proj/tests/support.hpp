#pragma once

#include <cstdint>
#include <vector>

#include "vads/metric.hpp"
#include "vads/rng.hpp"

namespace vads::testing {

inline Dataset random_dataset(std::size_t n, std::size_t dim, Metric m, std::uint64_t seed, double lo = 0.0,
                              double hi = 1.0) {
    Rng rng(seed);
    std::vector<double> coords(n * dim);
    for (auto& c : coords) c = uniform_real(rng, lo, hi);
    return Dataset(dim, m, std::move(coords));
}

inline std::vector<Point> random_points(std::size_t count, std::size_t dim, std::uint64_t seed, double lo = 0.0,
                                        double hi = 1.0) {
    Rng rng(seed);
    std::vector<Point> out(count, Point(dim));
    for (auto& p : out)
        for (auto& c : p) c = uniform_real(rng, lo, hi);
    return out;
}

inline Dataset line_dataset(std::initializer_list<double> xs, Metric m = Metric::L2) {
    return Dataset(1, m, std::vector<double>(xs));
}

}  // namespace vads::testing
