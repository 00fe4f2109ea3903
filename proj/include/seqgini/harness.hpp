#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "seqgini/errors.hpp"
#include "seqgini/population.hpp"
#include "seqgini/risk.hpp"
#include "seqgini/rng.hpp"
#include "seqgini/sequential.hpp"

namespace seqgini {
namespace mc {

// Infinite observation source backed by a seeded sampler stream.
class sampler_source {
  public:
    sampler_source(const BoundDistribution& dist, std::uint64_t stream_seed)
        : dist_(&dist), rng_(stream_seed) {}

    std::optional<double> operator()() { return dist_->sample(rng_); }

  private:
    const BoundDistribution* dist_;
    rng_stream rng_;
};

namespace detail {

// Work queue over replication indices. fn(i) runs on some worker; outputs
// must be keyed by i so that aggregation order never depends on scheduling.
template <typename Fn>
void for_each_index(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(
        std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));

    struct failure {
        std::size_t index;
        std::string message;
    };
    std::mutex failure_mutex;
    std::optional<failure> first_failure;
    std::atomic<std::size_t> next{0};

    const auto drain = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!first_failure || i < first_failure->index) {
                    first_failure = failure{i, e.what()};
                }
            }
        }
    };

    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (std::thread& t : pool) t.join();
    }
    if (first_failure) throw replication_error(first_failure->index, first_failure->message);
}

}  // namespace detail

// One estimate of (E[N] - n_c, achieved risk - minimum risk) from an
// independent batch of replications.
struct SecondOrderDiff {
    double n_diff = 0.0;
    double regret_diff = 0.0;
};

// Aggregated Monte Carlo study: estimator means at stopping with standard
// errors, final-sample-size statistics, and the risk report.
struct ReplicationSummary {
    std::size_t reps = 0;
    double sw2_bar = 0.0;
    double se_sw2 = 0.0;
    double tau_bar = 0.0;
    double se_tau = 0.0;
    double v2_bar = 0.0;
    double se_v2 = 0.0;
    double n_bar = 0.0;
    double se_n = 0.0;
    std::size_t max_n = 0;
    risk::RiskReport risk_report;
    PopulationParams truth;
    std::vector<SecondOrderDiff> second_order;  // filled by batch studies
    std::vector<StoppingResult> replications;   // index-ordered raw outcomes
};

namespace detail {

inline ReplicationSummary summarize(std::vector<StoppingResult> results,
                                    const PopulationParams& truth,
                                    const StudyConfig& config) {
    ReplicationSummary summary;
    summary.reps = results.size();
    summary.truth = truth;

    std::vector<double> sw2s, taus, v2s;
    sw2s.reserve(results.size());
    taus.reserve(results.size());
    v2s.reserve(results.size());
    for (const StoppingResult& r : results) {
        sw2s.push_back(r.sw2_final);
        taus.push_back(r.tau_final);
        v2s.push_back(r.v2_final);
        summary.max_n = std::max(summary.max_n, r.n_final);
    }
    const double dr = static_cast<double>(results.size());
    summary.sw2_bar = compensated_total(sw2s) / dr;
    summary.se_sw2 = standard_error(sw2s);
    summary.tau_bar = compensated_total(taus) / dr;
    summary.se_tau = standard_error(taus);
    summary.v2_bar = compensated_total(v2s) / dr;
    summary.se_v2 = standard_error(v2s);

    summary.risk_report = risk::empirical_report(results, truth, config);
    summary.n_bar = summary.risk_report.n_bar;
    summary.se_n = summary.risk_report.se_n_bar;
    summary.replications = std::move(results);
    return summary;
}

}  // namespace detail

// Run reps independent sequential experiments with per-replication derived
// seeds and aggregate. The result is identical for any worker count: every
// replication's stream depends only on (config.seed, index) and aggregation
// runs single-threaded in index order.
inline ReplicationSummary run_study(const PopulationModel& model, const StudyConfig& config,
                                    std::size_t reps, unsigned workers = 0) {
    config.validate();
    if (reps < 2) throw insufficient_replications_error(reps);
    const BoundDistribution dist = bind(model);
    const PopulationParams truth = population_params(dist);

    std::vector<StoppingResult> results(reps);
    detail::for_each_index(reps, workers, [&](std::size_t i) {
        sampler_source source(dist, derive_seed(config.seed, {seed_domain::study, i}));
        results[i] = run_sequential(source, config);
    });
    for (std::size_t i = 0; i < reps; ++i) {
        if (results[i].stopped_by_cap) {
            throw replication_error(i, "safety cap of " + std::to_string(config.cap) +
                                           " observations reached before stopping");
        }
    }
    return detail::summarize(std::move(results), truth, config);
}

// Repeat small independent studies to probe whether E[N] - n_c and the
// regret difference stay bounded. Batch b, replication i draws from the
// stream seeded by (seed, b, i); batches are disjoint from run_study
// streams by domain separation.
inline std::vector<SecondOrderDiff> run_second_order_batches(const PopulationModel& model,
                                                             const StudyConfig& config,
                                                             std::size_t batch_reps,
                                                             std::size_t batches,
                                                             unsigned workers = 0) {
    config.validate();
    if (batch_reps < 2) throw insufficient_replications_error(batch_reps);
    if (batches < 1) throw config_error("batches must be >= 1");
    const BoundDistribution dist = bind(model);
    const PopulationParams truth = population_params(dist);

    std::vector<SecondOrderDiff> diffs;
    diffs.reserve(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        std::vector<StoppingResult> results(batch_reps);
        detail::for_each_index(batch_reps, workers, [&](std::size_t i) {
            sampler_source source(dist,
                                  derive_seed(config.seed, {seed_domain::batch, b, i}));
            results[i] = run_sequential(source, config);
        });
        for (std::size_t i = 0; i < batch_reps; ++i) {
            if (results[i].stopped_by_cap) {
                throw replication_error(i, "safety cap reached in batch " + std::to_string(b));
            }
        }
        const risk::RiskReport report = risk::empirical_report(results, truth, config);
        diffs.push_back({report.n_bar - report.n_c, report.regret_difference});
    }
    return diffs;
}

struct FixedNStudy {
    std::size_t n = 0;
    std::size_t reps = 0;
    risk::MseEstimate mse;
};

// Fixed-sample-size companion study: reps samples of exactly n observations,
// mean squared error of G_n against the population Gini.
inline FixedNStudy run_fixed_n_study(const PopulationModel& model, std::size_t n,
                                     std::size_t reps, std::uint64_t seed,
                                     unsigned workers = 0) {
    if (n < 4) throw config_error("fixed-n study requires n >= 4");
    if (reps < 2) throw insufficient_replications_error(reps);
    const BoundDistribution dist = bind(model);
    const PopulationParams truth = population_params(dist);

    std::vector<double> sq(reps);
    detail::for_each_index(reps, workers, [&](std::size_t i) {
        rng_stream rng(derive_seed(seed, {seed_domain::fixed_n, i}));
        std::vector<double> values(n);
        for (double& x : values) x = dist.sample(rng);
        const EstimateSnapshot snap = seqgini::detail::snapshot_of(values);
        const double e = snap.gini - truth.gini;
        sq[i] = e * e;
    });

    FixedNStudy study;
    study.n = n;
    study.reps = reps;
    study.mse.mse = compensated_total(sq) / static_cast<double>(reps);
    study.mse.se = standard_error(sq);
    return study;
}

}  // namespace mc
}  // namespace seqgini
