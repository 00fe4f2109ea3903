#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "seqgini/errors.hpp"
#include "seqgini/math.hpp"

namespace seqgini {

// An ordered sequence of strictly positive income observations. Arrival
// order is preserved; estimators themselves are symmetric in the values.
class Sample {
  public:
    Sample() = default;

    explicit Sample(std::vector<double> values) {
        values_.reserve(values.size());
        for (double x : values) push_back(x);
    }

    void push_back(double x) {
        if (!std::isfinite(x) || !(x > 0.0)) throw rejected_observation_error(x);
        values_.push_back(x);
    }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::span<const double> view() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

  private:
    std::vector<double> values_;
};

// All estimators read out at one sample size. sw2/v2 need n >= 4; below
// that they stay flagged unavailable. gmd/variance degrade to 0 at n = 1.
struct EstimateSnapshot {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // S^2, (n-1)-divisor
    double gmd = 0.0;       // mean absolute pairwise difference
    double gini = 0.0;      // gmd / (2 mean)
    double tau = 0.0;       // E-hat of X1 |X1 - X2|
    double sw2 = 0.0;       // jackknife pseudo-value variance, estimates 4 sigma1^2
    double v2 = 0.0;        // plug-in estimate of xi^2, clamped at 0
    bool sw2_available = false;
    bool v2_available = false;
    bool v2_clamped = false;  // true when the raw plug-in value was negative
};

namespace detail {

// Shared kernel: every estimator from one pass structure over sorted values.
// Sorted-order identities used (y_(1) <= ... <= y_(n), 1-based ranks):
//   sum_{i<j} |y_i - y_j|   = sum_r (2r - n - 1) y_(r)
//   sum_{i<j} |y_i^2-y_j^2| = sum_r (2r - n - 1) y_(r)^2   (values positive)
//   R_(r) = sum_i |y_(r) - y_i| = (2r - n) y_(r) - 2 P_r + P_n,
// with P_r the inclusive prefix sum. Ties are safe: tied elements contribute
// zero either way, so any consistent rank assignment gives the same sums.
inline EstimateSnapshot snapshot_from_sorted(std::span<const double> y,
                                             std::vector<double>& pseudo_scratch) {
    EstimateSnapshot s;
    const std::size_t n = y.size();
    s.n = n;
    if (n == 0) return s;

    const double dn = static_cast<double>(n);
    const mean_variance mv = mean_and_variance(y);
    s.mean = mv.mean;
    s.variance = mv.variance;
    if (n < 2) return s;

    const double pair_count = 0.5 * dn * (dn - 1.0);

    compensated_sum diff_sum;     // sum (2r - n - 1) y_(r)
    compensated_sum diff_sq_sum;  // sum (2r - n - 1) y_(r)^2
    for (std::size_t r = 1; r <= n; ++r) {
        const double w = 2.0 * static_cast<double>(r) - dn - 1.0;
        const double v = y[r - 1];
        diff_sum.add(w * v);
        diff_sq_sum.add(w * v * v);
    }
    // both sums are sums of nonnegative sorted gaps; clear any
    // cancellation residue so the >= 0 invariants hold exactly
    s.gmd = std::max(0.0, diff_sum.value() / pair_count);
    s.tau = std::max(0.0, 0.5 * diff_sq_sum.value() / pair_count);
    s.gini = s.gmd / (2.0 * s.mean);

    if (n < 4) return s;

    // Jackknife pseudo-values W_(r) = n gmd - (n-2) gmd_without_(r).
    const double total = s.mean * dn;
    const double loo_pair_count = 0.5 * (dn - 1.0) * (dn - 2.0);
    pseudo_scratch.clear();
    pseudo_scratch.reserve(n);
    compensated_sum prefix;
    for (std::size_t r = 1; r <= n; ++r) {
        const double v = y[r - 1];
        prefix.add(v);
        const double abs_diff_to_all =
            (2.0 * static_cast<double>(r) - dn) * v - 2.0 * prefix.value() + total;
        const double loo_gmd = (pair_count * s.gmd - abs_diff_to_all) / loo_pair_count;
        pseudo_scratch.push_back(dn * s.gmd - (dn - 2.0) * loo_gmd);
    }
    const mean_variance wv = mean_and_variance(pseudo_scratch);
    s.sw2 = wv.variance;
    s.sw2_available = true;

    const double m2 = s.mean * s.mean;
    const double raw_v2 = s.gmd * s.gmd * s.variance / (4.0 * m2 * m2) -
                          (s.gmd / (m2 * s.mean)) * s.tau + s.gmd * s.gmd / m2 +
                          s.sw2 / (4.0 * m2);
    s.v2_clamped = raw_v2 < 0.0;
    s.v2 = s.v2_clamped ? 0.0 : raw_v2;
    s.v2_available = true;
    return s;
}

inline EstimateSnapshot snapshot_of(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> scratch;
    return snapshot_from_sorted(sorted, scratch);
}

inline void require_n(const Sample& sample, std::size_t needed, const char* what) {
    if (sample.size() < needed) {
        throw insufficient_sample_error(what, needed, sample.size());
    }
}

}  // namespace detail

// Incremental sufficient statistics over the growing sample. While the
// sorted cache is current (the snapshot-every-push pattern of the
// sequential engine) each push patches it in place; after a burst of
// pushes the next snapshot rebuilds it with one sort. Both paths hold the
// same multiset, so snapshots are identical. Single-threaded; movable
// between threads.
class EstimatorState {
  public:
    void push(double x) {
        if (!std::isfinite(x) || !(x > 0.0)) throw rejected_observation_error(x);
        values_.push_back(x);
        sum_x_.add(x);
        sum_x2_.add(x * x);
        // Patch the sorted cache only in the alternating push/snapshot
        // pattern; a burst of pushes flips to rebuild-by-sort instead.
        if (!sorted_dirty_ && snapshot_since_push_ && sorted_.size() + 1 == values_.size()) {
            sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), x), x);
        } else {
            sorted_dirty_ = true;
        }
        snapshot_since_push_ = false;
    }

    std::size_t size() const noexcept { return values_.size(); }
    double sum() const noexcept { return sum_x_.value(); }
    double sum_squares() const noexcept { return sum_x2_.value(); }

    // Arrival order, as pushed.
    const std::vector<double>& values() const noexcept { return values_; }

    EstimateSnapshot snapshot() const {
        if (sorted_dirty_) {
            sorted_ = values_;
            std::sort(sorted_.begin(), sorted_.end());
            sorted_dirty_ = false;
        }
        snapshot_since_push_ = true;
        return detail::snapshot_from_sorted(sorted_, pseudo_scratch_);
    }

  private:
    std::vector<double> values_;
    compensated_sum sum_x_;
    compensated_sum sum_x2_;
    mutable std::vector<double> sorted_;
    mutable std::vector<double> pseudo_scratch_;
    mutable bool sorted_dirty_ = false;
    mutable bool snapshot_since_push_ = true;
};

// Standalone estimators over a whole sample. Each re-sorts from scratch and
// must agree exactly with EstimatorState::snapshot() on the same multiset.

// Gini's mean difference: average |X_i - X_j| over all pairs. n >= 2.
inline double gmd(const Sample& sample) {
    detail::require_n(sample, 2, "gmd");
    return detail::snapshot_of(sample.view()).gmd;
}

// Gini index estimate gmd / (2 mean). n >= 2.
inline double gini(const Sample& sample) {
    detail::require_n(sample, 2, "gini");
    const EstimateSnapshot s = detail::snapshot_of(sample.view());
    if (!(s.mean > 0.0)) throw config_error("gini requires a positive sample mean");
    return s.gini;
}

// U-statistic estimate of tau = E(X1 |X1 - X2|); equals half the mean
// difference of the squared sample. n >= 2.
inline double tau_hat(const Sample& sample) {
    detail::require_n(sample, 2, "tau_hat");
    return detail::snapshot_of(sample.view()).tau;
}

// Jackknife pseudo-value variance; strongly consistent for 4 sigma1^2.
// n >= 4.
inline double s_w_squared(const Sample& sample) {
    detail::require_n(sample, 4, "s_w_squared");
    return detail::snapshot_of(sample.view()).sw2;
}

// Plug-in estimate of xi^2, clamped at 0. n >= 4.
inline double v_squared(const Sample& sample) {
    detail::require_n(sample, 4, "v_squared");
    return detail::snapshot_of(sample.view()).v2;
}

}  // namespace seqgini
