#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seqgini/errors.hpp"
#include "seqgini/estimators.hpp"

namespace seqgini {

// Stopping boundary variants. plain stops at the first n >= m with
// n >= sqrt(A/c) V_n; guarded adds n^-gamma to V_n so a fluke small
// variance estimate cannot end sampling almost immediately.
enum class StoppingRule : std::uint8_t { plain, guarded };

inline std::string to_string(StoppingRule rule) {
    return rule == StoppingRule::plain ? "plain" : "guarded";
}

inline StoppingRule stopping_rule_from_string(const std::string& s) {
    if (s == "plain") return StoppingRule::plain;
    if (s == "guarded") return StoppingRule::guarded;
    throw config_error("unknown stopping rule '" + s + "' (expected plain or guarded)");
}

// Study parameters: A weights squared estimation error in monetary terms,
// c is the cost per observation, m the pilot sample size.
struct StudyConfig {
    double A = 50000.0;
    double c = 0.1;
    std::size_t m = 10;
    StoppingRule rule = StoppingRule::plain;
    double gamma = 0.25;  // guarded rule only; must lie in (0, 0.5)
    std::uint64_t seed = 1;
    std::size_t cap = 1000000;
    bool record_trajectory = false;

    void validate() const {
        if (!(A > 0.0) || !std::isfinite(A)) throw config_error("A must be positive");
        if (!(c > 0.0) || !std::isfinite(c)) throw config_error("c must be positive");
        if (m < 4) throw config_error("pilot size m must be >= 4");
        if (!(gamma > 0.0 && gamma < 0.5)) throw config_error("gamma must lie in (0, 0.5)");
        if (cap <= m) throw config_error("cap must exceed the pilot size m");
    }
};

struct TrajectoryPoint {
    std::size_t n = 0;
    double v2 = 0.0;
    double threshold = 0.0;
};

// Outcome of one sequential run: the stopping time and the terminal
// estimates read out at it.
struct StoppingResult {
    std::size_t n_final = 0;
    double gini_final = 0.0;
    double v2_final = 0.0;
    double tau_final = 0.0;
    double sw2_final = 0.0;
    double mean_final = 0.0;
    bool stopped_by_cap = false;
    std::vector<TrajectoryPoint> trajectory;  // filled when record_trajectory
};

// Boundary value the sample size is compared against at size n:
//   plain    sqrt(A/c) sqrt(v2)
//   guarded  sqrt(A/c) (sqrt(v2) + n^-gamma)
inline double threshold(std::size_t n, double v2, const StudyConfig& config) {
    const double scale = std::sqrt(config.A / config.c);
    const double v = std::sqrt(v2);
    if (config.rule == StoppingRule::plain) return scale * v;
    return scale * (v + std::pow(static_cast<double>(n), -config.gamma));
}

// Consume observations one at a time until the first n >= m satisfying
// n >= threshold(n, V2_n). The source is any callable returning
// std::optional<double>; nullopt means the stream is exhausted, which
// raises insufficient_data_error. Hitting the cap is reported in the
// result, not thrown.
template <typename Source>
StoppingResult run_sequential(Source&& source, const StudyConfig& config) {
    config.validate();

    EstimatorState state;
    double last_bound = std::numeric_limits<double>::quiet_NaN();
    const auto take_one = [&]() -> double {
        std::optional<double> x = source();
        if (!x.has_value()) throw insufficient_data_error(state.size(), last_bound);
        return *x;
    };

    StoppingResult result;
    while (state.size() < config.m) state.push(take_one());

    for (;;) {
        const std::size_t n = state.size();
        const EstimateSnapshot snap = state.snapshot();
        const double bound = threshold(n, snap.v2, config);
        last_bound = bound;
        if (config.record_trajectory) {
            result.trajectory.push_back({n, snap.v2, bound});
        }
        const bool stop_now = static_cast<double>(n) >= bound;
        if (stop_now || n >= config.cap) {
            result.n_final = n;
            result.gini_final = snap.gini;
            result.v2_final = snap.v2;
            result.tau_final = snap.tau;
            result.sw2_final = snap.sw2;
            result.mean_final = snap.mean;
            result.stopped_by_cap = !stop_now;
            return result;
        }
        state.push(take_one());
    }
}

// Source over a fixed sample (file-backed data); exhausts at the end.
class sample_source {
  public:
    explicit sample_source(const Sample& sample) : sample_(&sample) {}

    std::optional<double> operator()() {
        if (next_ >= sample_->size()) return std::nullopt;
        return (*sample_)[next_++];
    }

  private:
    const Sample* sample_;
    std::size_t next_ = 0;
};

}  // namespace seqgini
