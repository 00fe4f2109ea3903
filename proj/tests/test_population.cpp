#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "seqgini/math.hpp"
#include "seqgini/population.hpp"
#include "seqgini/rng.hpp"

using namespace seqgini;

namespace {

const PopulationModel exponential_model{"exponential", {{"rate", 5.0}}};
const PopulationModel gamma_model{"gamma", {{"shape", 2.649}, {"rate", 0.84}}};
const PopulationModel lognormal_model{"lognormal", {{"meanlog", 2.185}, {"sdlog", 0.562}}};

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("regularized incomplete gamma sanity") {
    // P(1, x) = 1 - exp(-x); P(a, a) ~ 1/2 for large a.
    CHECK(regularized_gamma_p(1.0, 0.7) == doctest::Approx(-std::expm1(-0.7)).epsilon(1e-12));
    CHECK(regularized_gamma_p(2.0, 0.0) == 0.0);
    CHECK(regularized_gamma_p(50.0, 50.0) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(regularized_gamma_p(2.649, 1e4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quadrature integrates known integrals") {
    const double pi = std::numbers::pi;
    CHECK(quadrature::integrate([](double x) { return std::sin(x); }, 0.0, pi, 1e-10,
                                "sin") == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(quadrature::integrate_semi_infinite([](double x) { return std::exp(-x); }, 1e-10,
                                              "exp") == doctest::Approx(1.0).epsilon(1e-9));
    // Gaussian second moment over [0, inf): integral x^2 phi(x) dx = 1/2.
    CHECK(quadrature::integrate_semi_infinite(
              [&](double x) { return x * x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); },
              1e-10, "gauss2") == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("exponential population parameters are analytic") {
    const PopulationParams p = population_params(exponential_model);
    // exact values for rate lambda: delta = 1/lambda, tau = 3/(2 lambda^2),
    // sigma1^2 = 1/(3 lambda^2), xi2 = 1/12, gini = 1/2.
    CHECK(rel_err(p.mu, 0.2) < 1e-12);
    CHECK(rel_err(p.sigma2, 0.04) < 1e-12);
    CHECK(rel_err(p.delta, 0.2) < 1e-9);
    CHECK(rel_err(p.tau, 0.06) < 1e-9);
    CHECK(rel_err(p.sigma1_2, 1.0 / 75.0) < 1e-7);
    CHECK(rel_err(p.xi2, 1.0 / 12.0) < 1e-7);
    CHECK(rel_err(p.gini, 0.5) < 1e-9);
}

TEST_CASE("published truth values within half a percent") {
    const PopulationParams exp_p = population_params(exponential_model);
    CHECK(rel_err(4.0 * exp_p.sigma1_2, 0.0532) < 0.005);
    CHECK(rel_err(exp_p.tau, 0.0600) < 0.005);
    CHECK(rel_err(exp_p.xi2, 0.0833) < 0.005);

    const PopulationParams gam_p = population_params(gamma_model);
    CHECK(rel_err(4.0 * gam_p.sigma1_2, 3.5036) < 0.005);
    CHECK(rel_err(gam_p.tau, 7.8205) < 0.005);
    CHECK(rel_err(gam_p.xi2, 0.0468) < 0.005);

    const PopulationParams log_p = population_params(lognormal_model);
    CHECK(rel_err(4.0 * log_p.sigma1_2, 52.8108) < 0.005);
    CHECK(rel_err(log_p.tau, 85.2236) < 0.005);
}

TEST_CASE("closed-form gini cross-checks for gamma and lognormal") {
    // gamma shape k: gini = Gamma(k + 1/2) / (Gamma(k + 1) sqrt(pi));
    // lognormal sdlog s: gini = erf(s / 2).
    const PopulationParams gam_p = population_params(gamma_model);
    const double k = 2.649;
    const double gamma_gini =
        std::exp(std::lgamma(k + 0.5) - std::lgamma(k + 1.0)) / std::sqrt(std::numbers::pi);
    CHECK(rel_err(gam_p.gini, gamma_gini) < 1e-8);

    const PopulationParams log_p = population_params(lognormal_model);
    CHECK(rel_err(log_p.gini, std::erf(0.562 / 2.0)) < 1e-8);
}

TEST_CASE("gini and xi2 of the exponential family are scale invariant") {
    const PopulationParams a = population_params(PopulationModel{"exponential", {{"rate", 1.0}}});
    const PopulationParams b = population_params(exponential_model);
    CHECK(std::abs(a.gini - b.gini) < 1e-8);
    CHECK(std::abs(a.xi2 - b.xi2) < 1e-8);
}

TEST_CASE("xi2 assembly from stored components is bit-exact") {
    for (const PopulationModel& m : {exponential_model, gamma_model, lognormal_model}) {
        const PopulationParams p = population_params(m);
        CHECK(p.xi2 == assemble_xi2(p.mu, p.sigma2, p.delta, p.sigma1_2, p.tau));
        CHECK(p.gini > 0.0);
        CHECK(p.gini < 1.0);
        CHECK(p.xi2 > 0.0);
    }
}

TEST_CASE("draw is a pure function of model and seed") {
    const BoundDistribution dist = bind(gamma_model);
    rng_stream a(123);
    rng_stream b(123);
    for (int i = 0; i < 1000; ++i) {
        CHECK(dist.sample(a) == dist.sample(b));
    }
}

TEST_CASE("sampler moments match analytic means") {
    // 10^6 draws; means must land within 3 standard errors.
    const struct {
        PopulationModel model;
        double mu;
        double sigma2;
    } cases[] = {
        {exponential_model, 0.2, 0.04},
        {gamma_model, 2.649 / 0.84, 2.649 / (0.84 * 0.84)},
        {lognormal_model, std::exp(2.185 + 0.5 * 0.562 * 0.562),
         std::expm1(0.562 * 0.562) * std::exp(2.0 * 2.185 + 0.562 * 0.562)},
    };
    for (const auto& tc : cases) {
        const BoundDistribution dist = bind(tc.model);
        rng_stream rng(20240101);
        const std::size_t n = 1000000;
        compensated_sum sum;
        for (std::size_t i = 0; i < n; ++i) sum.add(dist.sample(rng));
        const double mean = sum.value() / static_cast<double>(n);
        const double se = std::sqrt(tc.sigma2 / static_cast<double>(n));
        CHECK(std::abs(mean - tc.mu) < 3.0 * se);
    }
}

TEST_CASE("quadrature moments agree with a pairwise Monte Carlo oracle") {
    // 10^7 sampled pairs per family estimate delta = E|X - Y| and
    // tau = E(X |X - Y|); quadrature must sit within 4 MC standard errors.
    for (const PopulationModel& m : {exponential_model, gamma_model, lognormal_model}) {
        const BoundDistribution dist = bind(m);
        const PopulationParams p = population_params(dist);
        rng_stream rng(987654321);
        const std::size_t pairs = 10000000;
        compensated_sum d_sum, d_sq, t_sum, t_sq;
        for (std::size_t i = 0; i < pairs; ++i) {
            const double x = dist.sample(rng);
            const double y = dist.sample(rng);
            const double d = std::abs(x - y);
            const double t = x * d;
            d_sum.add(d);
            d_sq.add(d * d);
            t_sum.add(t);
            t_sq.add(t * t);
        }
        const double np = static_cast<double>(pairs);
        const double d_mean = d_sum.value() / np;
        const double d_se = std::sqrt((d_sq.value() / np - d_mean * d_mean) / np);
        const double t_mean = t_sum.value() / np;
        const double t_se = std::sqrt((t_sq.value() / np - t_mean * t_mean) / np);
        CHECK(std::abs(p.delta - d_mean) < 4.0 * d_se);
        CHECK(std::abs(p.tau - t_mean) < 4.0 * t_se);
    }
}

TEST_CASE("quadrature reports non-convergence with the integral name") {
    try {
        quadrature::integrate([](double x) { return std::sin(1.0 / (x + 1e-15)); }, 0.0, 1.0,
                              1e-13, "oscillator");
        FAIL("expected quadrature_error");
    } catch (const quadrature_error& e) {
        CHECK(e.integral() == "oscillator");
    }
}

TEST_CASE("model validation errors") {
    CHECK_THROWS_AS(population_params(PopulationModel{"weibull", {{"shape", 1.0}}}),
                    config_error);
    CHECK_THROWS_AS(population_params(PopulationModel{"exponential", {}}), config_error);
    CHECK_THROWS_AS(population_params(PopulationModel{"exponential", {{"rate", -2.0}}}),
                    config_error);
    CHECK_THROWS_AS(population_params(PopulationModel{"exponential", {{"rate", 5.0}, {"scale", 2.0}}}),
                    config_error);
    CHECK_THROWS_AS(population_params(PopulationModel{"gamma", {{"shape", 2.0}}}), config_error);
}

TEST_CASE("families can be registered at runtime") {
    // Uniform(0, b): everything needed by the truth pipeline in closed form.
    register_family("uniform", [](const PopulationModel& model) {
        const double b = model.params.at("b");
        BoundDistribution d;
        d.mu = 0.5 * b;
        d.sigma2 = b * b / 12.0;
        d.pdf = [b](double x) { return (x >= 0.0 && x <= b) ? 1.0 / b : 0.0; };
        d.cdf = [b](double x) { return x <= 0.0 ? 0.0 : (x >= b ? 1.0 : x / b); };
        d.partial_mean = [b](double x) {
            const double t = std::clamp(x, 0.0, b);
            return 0.5 * t * t / b;
        };
        d.sample = [b](rng_stream& rng) { return b * rng.uniform_open(); };
        return d;
    });
    const PopulationParams p = population_params(PopulationModel{"uniform", {{"b", 3.0}}});
    CHECK(rel_err(p.delta, 1.0) < 1e-8);   // E|X - Y| = b/3
    CHECK(rel_err(p.gini, 1.0 / 3.0) < 1e-8);
}
