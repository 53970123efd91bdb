#pragma once

#include "vads/error.hpp"
#include "vads/rng.hpp"
#include "vads/metric.hpp"
#include "vads/io.hpp"
#include "vads/graph.hpp"
#include "vads/search.hpp"
#include "vads/construction.hpp"
#include "vads/instances.hpp"
#include "vads/verifier.hpp"
#include "vads/eval.hpp"
