#pragma once

// Gittins-index allocation for experiments with exponential rewards.

#include "gittins_exp/arm_state.hpp"
#include "gittins_exp/config.hpp"
#include "gittins_exp/index_table.hpp"
#include "gittins_exp/oracle.hpp"
#include "gittins_exp/policy.hpp"
#include "gittins_exp/random.hpp"
#include "gittins_exp/results_csv.hpp"
#include "gittins_exp/simulation.hpp"
#include "gittins_exp/stats.hpp"
