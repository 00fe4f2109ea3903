#pragma once

// Purely sequential minimum-risk point estimation of the Gini index:
// incremental U-statistic estimators, plug-in variance, stopping rules,
// risk analysis, and a seeded Monte Carlo replication harness.

#include "seqgini/errors.hpp"
#include "seqgini/estimators.hpp"
#include "seqgini/harness.hpp"
#include "seqgini/io.hpp"
#include "seqgini/math.hpp"
#include "seqgini/population.hpp"
#include "seqgini/quadrature.hpp"
#include "seqgini/risk.hpp"
#include "seqgini/rng.hpp"
#include "seqgini/sequential.hpp"
