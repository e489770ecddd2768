#pragma once

#include "kcore/errors.hpp"
#include "kcore/numeric.hpp"
#include "kcore/thresholds.hpp"
#include "kcore/rng.hpp"
#include "kcore/hypergraph.hpp"
#include "kcore/stripping.hpp"
#include "kcore/depth.hpp"
#include "kcore/io.hpp"
#include "kcore/experiments.hpp"
