#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wavecov {

/// One-dimensional rule: nodes and weights on some interval.
struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

namespace detail {

// Gauss-Legendre on [-1,1] by Newton iteration on P_n. Long double
// accumulation keeps the nodes good to ~1e-18.
inline Rule1D gauss_legendre_uncached(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 1; i <= m; ++i) {
        long double z = std::cos(3.14159265358979323846L * (i - 0.25L) / (n + 0.5L));
        long double pp = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            long double p1 = 1.0L, p2 = 0.0L;
            for (int j = 0; j < n; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j + 1.0L) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0L);
            const long double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-19L) break;
        }
        r.x[i - 1] = static_cast<double>(-z);
        r.x[n - i] = static_cast<double>(z);
        const double w = static_cast<double>(2.0L / ((1.0L - z * z) * pp * pp));
        r.w[i - 1] = w;
        r.w[n - i] = w;
    }
    return r;
}

}  // namespace detail

/// Cached Gauss-Legendre rule on [-1,1].
inline const Rule1D& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, Rule1D> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::gauss_legendre_uncached(n)).first;
    return it->second;
}

/// GL panel on [lo, hi].
inline Rule1D panel(double lo, double hi, int n) {
    const Rule1D& g = gauss_legendre(n);
    Rule1D r;
    r.x.resize(g.size());
    r.w.resize(g.size());
    const double c = 0.5 * (hi + lo), s = 0.5 * (hi - lo);
    for (std::size_t i = 0; i < g.size(); ++i) {
        r.x[i] = c + s * g.x[i];
        r.w[i] = s * g.w[i];
    }
    return r;
}

/// Panel for ∫ F(z) dz over [lo,hi] where F ~ dist^e near one endpoint,
/// e > -1. Substituting u = dist^(1+e) makes the transformed integrand
/// smooth when F is exactly a power times a smooth factor.
inline Rule1D absorbed_panel(double lo, double hi, double e, bool singular_at_lo, int n) {
    if (e <= -1.0) throw std::invalid_argument("absorbed_panel: exponent must be > -1");
    if (!(hi > lo)) throw std::invalid_argument("absorbed_panel: empty interval");
    if (std::abs(e) < 1e-14) return panel(lo, hi, n);
    const Rule1D& g = gauss_legendre(n);
    Rule1D r;
    r.x.resize(g.size());
    r.w.resize(g.size());
    const double L = hi - lo;
    const double q = 1.0 + e;
    const double U = std::pow(L, q);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double u = 0.5 * (g.x[i] + 1.0) * U;
        const double wu = 0.5 * g.w[i] * U;
        const double s = std::pow(u, 1.0 / q);
        r.x[i] = singular_at_lo ? lo + s : hi - s;
        r.w[i] = wu * std::pow(u, 1.0 / q - 1.0) / q;
    }
    return r;
}

/// Appends geometric (factor-2) panels covering [lo, hi], n nodes each.
inline void append_log_panels(Rule1D& out, double lo, double hi, int n, double factor = 2.0) {
    double a = lo;
    while (a < hi * (1.0 - 1e-15)) {
        const double b = std::min(a * factor, hi);
        Rule1D p = panel(a, b, n);
        out.x.insert(out.x.end(), p.x.begin(), p.x.end());
        out.w.insert(out.w.end(), p.w.begin(), p.w.end());
        a = b;
    }
}

inline void append_rule(Rule1D& out, const Rule1D& p) {
    out.x.insert(out.x.end(), p.x.begin(), p.x.end());
    out.w.insert(out.w.end(), p.w.begin(), p.w.end());
}

/// Fixed-order pairwise (tree) summation; the reduction order never depends
/// on chunking, so results are bit-identical across worker counts.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

/// Applies `f` over a rule and pairwise-sums w_i f(x_i).
template <typename F>
double apply_rule(const Rule1D& r, F&& f) {
    std::vector<double> terms(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) terms[i] = r.w[i] * f(r.x[i]);
    return pairwise_sum(terms);
}

}  // namespace wavecov
