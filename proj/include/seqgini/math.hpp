#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "seqgini/errors.hpp"

namespace seqgini {

// Neumaier-compensated accumulator. Order of add() calls is part of the
// determinism contract: summing the same values in the same order gives
// bit-identical results on every run.
class compensated_sum {
  public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) noexcept {
    compensated_sum s;
    for (double x : xs) s.add(x);
    return s.value();
}

// Mean and (n-1)-divisor variance of a sequence, two-pass.
struct mean_variance {
    double mean = 0.0;
    double variance = 0.0;
};

inline mean_variance mean_and_variance(std::span<const double> xs) noexcept {
    mean_variance mv;
    const std::size_t n = xs.size();
    if (n == 0) return mv;
    mv.mean = compensated_total(xs) / static_cast<double>(n);
    if (n < 2) return mv;
    compensated_sum ss;
    for (double x : xs) {
        const double d = x - mv.mean;
        ss.add(d * d);
    }
    mv.variance = ss.value() / static_cast<double>(n - 1);
    return mv;
}

// Standard error of the mean over i.i.d. replications: sd / sqrt(R).
inline double standard_error(std::span<const double> xs) noexcept {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const mean_variance mv = mean_and_variance(xs);
    return std::sqrt(mv.variance / static_cast<double>(n));
}

// Standard normal CDF.
inline double normal_cdf(double z) noexcept {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace detail {

// Regularized lower incomplete gamma P(a, x), series branch (x < a + 1).
inline double igamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw quadrature_error("igamma_series");
}

// Regularized upper incomplete gamma Q(a, x) via Lentz continued fraction
// (x >= a + 1).
inline double igamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw quadrature_error("igamma_cf");
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw config_error("regularized_gamma_p requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::igamma_series(a, x);
    return 1.0 - detail::igamma_cf(a, x);
}

}  // namespace seqgini
