#pragma once

// Umbrella header.

#include "stocpack/common.hpp"
#include "stocpack/model.hpp"
#include "stocpack/lp.hpp"
#include "stocpack/simplex.hpp"
#include "stocpack/knapsack_lp.hpp"
#include "stocpack/knapsack_algs.hpp"
#include "stocpack/mab_lp.hpp"
#include "stocpack/decomposition.hpp"
#include "stocpack/scheduler.hpp"
#include "stocpack/mab_pipelines.hpp"
#include "stocpack/oracle.hpp"
#include "stocpack/generators.hpp"
#include "stocpack/harness.hpp"
#include "stocpack/json_io.hpp"
#include "stocpack/certify.hpp"
