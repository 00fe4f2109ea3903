#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "seqgini/errors.hpp"

namespace seqgini {

// Globally adaptive Gauss-Kronrod (G7, K15) integration. The worst interval
// (by error estimate) is bisected until the summed error estimate meets the
// requested absolute tolerance. Evaluation order is fixed, so results are
// deterministic for a given integrand.
namespace quadrature {

namespace detail {

// K15 abscissae on [0, 1] (positive half; symmetric) and weights.
// Odd-indexed abscissae are the embedded G7 nodes.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct interval {
    double a;
    double b;
    double estimate;
    double error;
};

template <typename F>
interval evaluate(const F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    double kronrod = 0.0;
    double gauss = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kronrod_x[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += kronrod_w[i] * fsum;
        if (i % 2 == 1) gauss += gauss_w[i / 2] * fsum;
    }
    const double fc = f(mid);
    kronrod += kronrod_w[7] * fc;
    gauss += gauss_w[3] * fc;

    interval iv;
    iv.a = a;
    iv.b = b;
    iv.estimate = kronrod * half;
    // Scaled error estimate, as in QUADPACK.
    const double raw = std::abs(kronrod - gauss) * half;
    iv.error = std::pow(200.0 * raw, 1.5);
    if (!(iv.error < raw)) iv.error = raw;
    return iv;
}

}  // namespace detail

// Integrate f over finite [a, b] to absolute tolerance abs_tol.
// Throws quadrature_error(name) if the tolerance cannot be met.
template <typename F>
double integrate(const F& f, double a, double b, double abs_tol,
                 const std::string& name) {
    constexpr std::size_t max_intervals = 2000;

    std::vector<detail::interval> heap;
    heap.push_back(detail::evaluate(f, a, b));
    const auto by_error = [](const detail::interval& lhs, const detail::interval& rhs) {
        return lhs.error < rhs.error;
    };

    double total_error = heap.front().error;
    while (total_error > abs_tol) {
        if (heap.size() >= max_intervals) throw quadrature_error(name);
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const detail::interval worst = heap.back();
        heap.pop_back();

        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) throw quadrature_error(name);

        const detail::interval left = detail::evaluate(f, worst.a, mid);
        const detail::interval right = detail::evaluate(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
        if (!std::isfinite(total_error)) throw quadrature_error(name);
    }

    // Deterministic reduction: sum interval estimates in left-to-right order.
    std::sort(heap.begin(), heap.end(),
              [](const detail::interval& lhs, const detail::interval& rhs) {
                  return lhs.a < rhs.a;
              });
    double result = 0.0;
    double comp = 0.0;
    for (const detail::interval& iv : heap) {
        const double t = result + iv.estimate;
        if (std::abs(result) >= std::abs(iv.estimate)) {
            comp += (result - t) + iv.estimate;
        } else {
            comp += (iv.estimate - t) + result;
        }
        result = t;
    }
    return result + comp;
}

// Integrate f over [0, inf) via the substitution x = t / (1 - t).
template <typename F>
double integrate_semi_infinite(const F& f, double abs_tol, const std::string& name) {
    const auto transformed = [&f](double t) {
        const double u = 1.0 - t;
        const double x = t / u;
        const double v = f(x) / (u * u);
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(transformed, 0.0, 1.0, abs_tol, name);
}

}  // namespace quadrature
}  // namespace seqgini
