#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "seqgini/errors.hpp"
#include "seqgini/math.hpp"
#include "seqgini/population.hpp"
#include "seqgini/sequential.hpp"

namespace seqgini {
namespace risk {

// Sample size minimizing the approximate risk A xi2 / n + c n. Real-valued;
// rounding happens only in display.
inline double optimal_n(double xi2, double A, double c) {
    return std::sqrt(A / c) * std::sqrt(xi2);
}

// Approximate expected cost of estimating with a fixed sample of size n.
inline double fixed_n_risk(double n, double xi2, double A, double c) {
    return A * xi2 / n + c * n;
}

// Theoretical optimum plus the Monte Carlo estimates of what the sequential
// procedure actually achieved.
struct RiskReport {
    double n_c = 0.0;             // optimal sample size (unrounded)
    double min_risk = 0.0;        // 2 c n_c
    double empirical_risk = 0.0;  // A mean((G_N - G_F)^2) + c mean(N)
    double se_empirical_risk = 0.0;
    double ratio_regret = 0.0;       // empirical_risk / min_risk
    double regret_difference = 0.0;  // empirical_risk - min_risk
    double n_bar = 0.0;
    double se_n_bar = 0.0;
    double n_ratio = 0.0;  // n_bar / n_c
};

struct MseEstimate {
    double mse = 0.0;
    double se = 0.0;
};

// Mean squared error of the terminal Gini estimates around the population
// value, with its replication standard error.
inline MseEstimate empirical_mse(std::span<const StoppingResult> results,
                                 const PopulationParams& truth) {
    if (results.size() < 2) throw insufficient_replications_error(results.size());
    std::vector<double> sq;
    sq.reserve(results.size());
    for (const StoppingResult& r : results) {
        const double e = r.gini_final - truth.gini;
        sq.push_back(e * e);
    }
    MseEstimate out;
    out.mse = compensated_total(sq) / static_cast<double>(sq.size());
    out.se = standard_error(sq);
    return out;
}

// Aggregate replication outcomes into the regret picture: per-replication
// realized cost r_i = A (G_i - G_F)^2 + c N_i, averaged and compared with
// the theoretical minimum 2 c n_c.
inline RiskReport empirical_report(std::span<const StoppingResult> results,
                                   const PopulationParams& truth,
                                   const StudyConfig& config) {
    if (results.size() < 2) throw insufficient_replications_error(results.size());

    RiskReport report;
    report.n_c = optimal_n(truth.xi2, config.A, config.c);
    report.min_risk = 2.0 * config.c * report.n_c;

    std::vector<double> costs;
    std::vector<double> sizes;
    costs.reserve(results.size());
    sizes.reserve(results.size());
    for (const StoppingResult& r : results) {
        const double e = r.gini_final - truth.gini;
        const double n = static_cast<double>(r.n_final);
        costs.push_back(config.A * e * e + config.c * n);
        sizes.push_back(n);
    }
    report.empirical_risk = compensated_total(costs) / static_cast<double>(costs.size());
    report.se_empirical_risk = standard_error(costs);
    report.n_bar = compensated_total(sizes) / static_cast<double>(sizes.size());
    report.se_n_bar = standard_error(sizes);
    report.ratio_regret = report.empirical_risk / report.min_risk;
    report.regret_difference = report.empirical_risk - report.min_risk;
    report.n_ratio = report.n_bar / report.n_c;
    return report;
}

}  // namespace risk
}  // namespace seqgini
