#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "seqgini/risk.hpp"

using namespace seqgini;

TEST_CASE("optimal_n closed forms") {
    CHECK(risk::optimal_n(1.0, 2.0, 2.0) == 1.0);
    CHECK(risk::optimal_n(0.0833, 50000.0, 0.1) == doctest::Approx(204.0834).epsilon(1e-6));
    CHECK(risk::optimal_n(0.0468, 50000.0, 0.1) == doctest::Approx(152.9706).epsilon(1e-6));
}

TEST_CASE("optimal_n scaling law in (A, c)") {
    const double base = risk::optimal_n(0.05, 50000.0, 0.1);
    for (double k : {0.01, 0.5, 3.0, 1e4}) {
        CHECK(risk::optimal_n(0.05, k * 50000.0, k * 0.1) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("fixed_n_risk attains its minimum at optimal_n") {
    const double xi2 = 0.0833;
    const double A = 50000.0;
    const double c = 0.1;
    const double n_c = risk::optimal_n(xi2, A, c);

    CHECK(risk::fixed_n_risk(n_c, xi2, A, c) == doctest::Approx(2.0 * c * n_c).epsilon(1e-12));
    CHECK(risk::fixed_n_risk(204.08, xi2, A, c) == doctest::Approx(40.816).epsilon(1e-4));
    CHECK(risk::fixed_n_risk(0.5 * n_c, xi2, A, c) > risk::fixed_n_risk(n_c, xi2, A, c));
    CHECK(risk::fixed_n_risk(2.0 * n_c, xi2, A, c) > risk::fixed_n_risk(n_c, xi2, A, c));

    // grid minimum sits within one grid step of the closed form
    double best_n = 0.0;
    double best = std::numeric_limits<double>::infinity();
    const double step = 0.01;
    for (double n = 1.0; n <= 500.0; n += step) {
        const double h = risk::fixed_n_risk(n, xi2, A, c);
        if (h < best) {
            best = h;
            best_n = n;
        }
    }
    CHECK(std::abs(best_n - n_c) <= step);
}

namespace {

StoppingResult result_of(std::size_t n, double gini) {
    StoppingResult r;
    r.n_final = n;
    r.gini_final = gini;
    return r;
}

}  // namespace

TEST_CASE("degenerate replications: exact gini at exactly n_c") {
    // xi2 = 0.04, A/c = 1e6 gives integral n_c = 200.
    PopulationParams truth;
    truth.gini = 0.37;
    truth.xi2 = 0.04;
    StudyConfig config;
    config.A = 100000.0;
    config.c = 0.1;

    std::vector<StoppingResult> results(5, result_of(200, truth.gini));
    const risk::RiskReport report = risk::empirical_report(results, truth, config);
    CHECK(report.n_c == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(report.min_risk == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(report.empirical_risk == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(report.ratio_regret == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.n_bar == 200.0);
    CHECK(report.se_n_bar == 0.0);
    CHECK(report.se_empirical_risk == 0.0);
}

TEST_CASE("regret identities and standard errors") {
    PopulationParams truth;
    truth.gini = 0.5;
    truth.xi2 = 1.0 / 12.0;
    StudyConfig config;  // A = 50000, c = 0.1

    std::vector<StoppingResult> results = {
        result_of(180, 0.492), result_of(210, 0.505), result_of(197, 0.498),
        result_of(222, 0.513), result_of(204, 0.5),
    };
    const risk::RiskReport report = risk::empirical_report(results, truth, config);

    CHECK(report.min_risk == 2.0 * config.c * report.n_c);
    CHECK(report.ratio_regret > 0.0);
    CHECK(std::abs(report.regret_difference -
                   (report.ratio_regret - 1.0) * report.min_risk) <= 1e-12 * report.min_risk);
    CHECK(report.n_ratio == doctest::Approx(report.n_bar / report.n_c).epsilon(1e-15));

    // per-replication costs recomputed by hand
    double cost_sum = 0.0;
    for (const StoppingResult& r : results) {
        const double e = r.gini_final - truth.gini;
        cost_sum += config.A * e * e + config.c * static_cast<double>(r.n_final);
    }
    CHECK(report.empirical_risk == doctest::Approx(cost_sum / 5.0).epsilon(1e-14));
}

TEST_CASE("empirical_mse of exact estimates is zero") {
    PopulationParams truth;
    truth.gini = 0.41;
    std::vector<StoppingResult> results(10, result_of(50, truth.gini));
    const risk::MseEstimate mse = risk::empirical_mse(results, truth);
    CHECK(mse.mse == 0.0);
    CHECK(mse.se == 0.0);
}

TEST_CASE("aggregation requires at least two replications") {
    PopulationParams truth;
    truth.gini = 0.5;
    truth.xi2 = 0.05;
    StudyConfig config;
    std::vector<StoppingResult> one(1, result_of(10, 0.5));
    CHECK_THROWS_AS(risk::empirical_report(one, truth, config), insufficient_replications_error);
    CHECK_THROWS_AS(risk::empirical_mse(one, truth), insufficient_replications_error);
}
