#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecov/fit.hpp"
#include "wavecov/geometry.hpp"
#include "wavecov/kernels.hpp"
#include "wavecov/moments.hpp"
#include "wavecov/quadrature.hpp"
#include "wavecov/rng.hpp"

namespace wavecov {

enum class ModeScheme { Auto, RadialAngular, OffsetLattice };

/// Discretization of the spectral measure: frequencies with cell masses.
struct ModeSet {
    std::vector<Point3> frequencies;
    std::vector<double> weights;  // mu(cell), >= 0
    double cutoff = 0.0;
    ModeScheme scheme = ModeScheme::Auto;
    double captured_mass = 0.0;  // fraction of the (H2) integral carried by the set
    bool low_mass_warning = false;
    std::size_t size() const { return frequencies.size(); }
};

/// Realizations of the linear solution on a time x space grid.
struct FieldSample {
    std::vector<double> times;
    std::vector<Point3> points;
    std::size_t n_real = 0;
    std::uint64_t seed = 0;
    std::size_t mode_count = 0;
    std::vector<double> values;  // [realization][time][point], time-major inside a realization

    double at(std::size_t i, std::size_t j, std::size_t p) const {
        return values[(i * times.size() + j) * points.size() + p];
    }
    double& at(std::size_t i, std::size_t j, std::size_t p) {
        return values[(i * times.size() + j) * points.size() + p];
    }
};

struct VariogramCurve {
    std::vector<double> lags;
    std::vector<double> values;
    std::vector<double> stderrs;  // empty for exact curves
    Point3 direction{1, 0, 0};
    std::string method;  // "exact" or "mc"
};

// ---------------------------------------------------------------------------
// Mode sets
// ---------------------------------------------------------------------------

namespace detail {

/// Mass and centroid of int_a^b xi^{e} dxi for e > -1, 0 <= a < b.
inline double power_cell_mass(double a, double b, double e) {
    return (std::pow(b, e + 1.0) - std::pow(a, e + 1.0)) / (e + 1.0);
}
inline double power_cell_centroid(double a, double b, double e) {
    return power_cell_mass(a, b, e + 1.0) / power_cell_mass(a, b, e);
}

inline ModeSet build_lattice(const KernelSpec& kernel, double cutoff, int n) {
    if (n % 2 != 0) throw std::invalid_argument("offset lattice: resolution must be even");
    const SpectralDensity& d = kernel.spectral_density();
    const auto& a = d.axis_exponents();
    const double pref = d.axis_prefactor();
    const double delta = 2.0 * cutoff / n;

    // per-axis cell masses and centroids over [-cutoff, cutoff]
    std::array<std::vector<double>, 3> mass, cent;
    for (int ax = 0; ax < 3; ++ax) {
        mass[ax].resize(n);
        cent[ax].resize(n);
        for (int k = 0; k < n; ++k) {
            const double lo = -cutoff + k * delta, hi = lo + delta;
            const double s = (lo >= 0.0) ? 1.0 : -1.0;
            const double alo = std::min(std::abs(lo), std::abs(hi));
            const double ahi = std::max(std::abs(lo), std::abs(hi));
            mass[ax][k] = power_cell_mass(alo, ahi, a[ax]);
            cent[ax][k] = s * power_cell_centroid(alo, ahi, a[ax]);
        }
    }
    ModeSet m;
    m.scheme = ModeScheme::OffsetLattice;
    m.cutoff = cutoff;
    m.frequencies.reserve(static_cast<std::size_t>(n) * n * n);
    m.weights.reserve(m.frequencies.capacity());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                m.frequencies.push_back({cent[0][i], cent[1][j], cent[2][k]});
                m.weights.push_back(pref * mass[0][i] * mass[1][j] * mass[2][k]);
            }
    return m;
}

inline ModeSet build_radial_angular(const KernelSpec& kernel, double cutoff, int n_radial) {
    const SpectralDensity& d = kernel.spectral_density();
    SphereRule sph = SphereRule::product_gauss(12);
    // geometric radial cells down to r_min, plus one head cell [0, r_min]
    const double r_min = std::min(0.05, cutoff / 1024.0);
    const double g = std::pow(r_min / cutoff, 1.0 / n_radial);
    std::vector<double> edges(n_radial + 1);
    for (int k = 0; k <= n_radial; ++k) edges[k] = cutoff * std::pow(g, n_radial - k);

    ModeSet m;
    m.scheme = ModeScheme::RadialAngular;
    m.cutoff = cutoff;
    auto add_cell = [&](double lo, double hi) {
        // radial mass int rho r^2 dr and its centroid, by a small rule
        Rule1D cell = (lo == 0.0)
                          ? absorbed_panel(0.0, hi, 2.0 - d.radial_singularity_exponent(), true, 16)
                          : panel(lo, hi, 16);
        double mass = 0.0, first = 0.0;
        for (std::size_t q = 0; q < cell.size(); ++q) {
            const double r = cell.x[q];
            const double val = cell.w[q] * d.radial(r) * r * r;
            mass += val;
            first += val * r;
        }
        if (mass <= 0.0) return;
        const double r_rep = first / mass;
        for (std::size_t s = 0; s < sph.nodes.size(); ++s) {
            m.frequencies.push_back(r_rep * sph.nodes[s]);
            m.weights.push_back(mass * sph.weights[s]);
        }
    };
    add_cell(0.0, edges[0]);
    for (int k = 0; k < n_radial; ++k) add_cell(edges[k], edges[k + 1]);
    return m;
}

}  // namespace detail

inline ModeSet build_mode_set(const KernelSpec& kernel, double cutoff, int resolution,
                              ModeScheme scheme = ModeScheme::Auto) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("build_mode_set: cutoff must be positive");
    if (resolution < 8) throw std::invalid_argument("build_mode_set: resolution must be >= 8");
    if (scheme == ModeScheme::Auto)
        scheme = kernel.isotropic() ? ModeScheme::RadialAngular : ModeScheme::OffsetLattice;
    ModeSet m = (scheme == ModeScheme::OffsetLattice) ? detail::build_lattice(kernel, cutoff, resolution)
                                                      : detail::build_radial_angular(kernel, cutoff, resolution);
    // captured (H2) mass: sum w_k/(1+|xi_k|^2) against the certified integral
    const double h2 = kernel.spectral_density().h2_integral();
    if (std::isfinite(h2) && h2 > 0.0) {
        std::vector<double> terms(m.size());
        for (std::size_t k = 0; k < m.size(); ++k)
            terms[k] = m.weights[k] / (1.0 + m.frequencies[k].norm2());
        m.captured_mass = std::min(1.0, pairwise_sum(terms) / h2);
    } else {
        m.captured_mass = 0.0;
    }
    m.low_mass_warning = m.captured_mass < 0.9;
    return m;
}

// ---------------------------------------------------------------------------
// Per-mode time covariance
// ---------------------------------------------------------------------------

/// Sigma_jl = int_0^{min(tj,tl)} sin((tj-s) r) sin((tl-s) r) / r^2 ds,
/// in closed form; a short quadrature takes over below r*t = 0.5 where the
/// closed form would cancel.
inline double mode_time_covariance_entry(double r, double tj, double tl) {
    const double a = std::min(tj, tl), b = std::max(tj, tl);
    if (a <= 0.0) return 0.0;
    if (r * b >= 0.5) {
        const double d = b - a;
        return a * (std::cos(d * r) - std::cos(b * r) * sinc(a * r)) / (2.0 * r * r);
    }
    const Rule1D& gl = gauss_legendre(16);
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) {
        const double s = 0.5 * a * (gl.x[q] + 1.0);
        const double u = a - s, v = b - s;
        acc += 0.5 * a * gl.w[q] * u * v * sinc(u * r) * sinc(v * r);
    }
    return acc;
}

/// Full matrix over an ordered time grid; symmetric PSD.
inline std::vector<double> mode_time_covariance(double xi_norm, const std::vector<double>& times) {
    if (!(xi_norm > 0.0)) throw std::invalid_argument("mode_time_covariance: xi_norm must be > 0");
    for (std::size_t j = 0; j + 1 < times.size(); ++j)
        if (times[j] > times[j + 1]) throw std::invalid_argument("mode_time_covariance: times must be ordered");
    const std::size_t m = times.size();
    std::vector<double> cov(m * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = j; l < m; ++l)
            cov[j * m + l] = cov[l * m + j] = mode_time_covariance_entry(xi_norm, times[j], times[l]);
    return cov;
}

namespace detail {

/// Cholesky with a relative jitter allowance of 1e-12; throws beyond it.
inline std::vector<double> cholesky_psd(std::vector<double> a, std::size_t m) {
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(a[j * m + j]));
    if (scale == 0.0) return std::vector<double>(m * m, 0.0);
    const double jitter = 1e-12 * scale;
    for (std::size_t j = 0; j < m; ++j) a[j * m + j] += jitter;
    std::vector<double> L(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double d = a[j * m + j];
        for (std::size_t k = 0; k < j; ++k) d -= L[j * m + k] * L[j * m + k];
        if (d < -jitter * 10.0)
            throw std::runtime_error("mode time covariance is not PSD beyond jitter");
        L[j * m + j] = std::sqrt(std::max(d, 0.0));
        for (std::size_t i = j + 1; i < m; ++i) {
            double s = a[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * m + k] * L[j * m + k];
            L[i * m + j] = (L[j * m + j] > 0.0) ? s / L[j * m + j] : 0.0;
        }
    }
    return L;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Field synthesis
// ---------------------------------------------------------------------------

/// Spectral synthesis of the Gaussian linear solution:
///   u(t_j, x) = sum_k sqrt(w_k) [cos(xi_k.x) A_k(t_j) + sin(xi_k.x) B_k(t_j)]
/// with A_k, B_k independent centered Gaussian vectors with the per-mode
/// time covariance. Exact in law for the truncated spectral measure.
/// Realization i draws from substream (seed, i); results are bit-identical
/// for a fixed ModeSet regardless of scheduling.
inline FieldSample simulate_field(const ModeSet& modes, const std::vector<double>& times,
                                  const std::vector<Point3>& points, std::size_t n_real,
                                  std::uint64_t seed) {
    if (n_real < 1) throw std::invalid_argument("simulate_field: n_real must be >= 1");
    if (times.empty() || points.empty()) throw std::invalid_argument("simulate_field: empty grid");
    const std::size_t m = times.size(), np = points.size(), nk = modes.size();

    FieldSample out;
    out.times = times;
    out.points = points;
    out.n_real = n_real;
    out.seed = seed;
    out.mode_count = nk;
    out.values.assign(n_real * m * np, 0.0);

    std::vector<RngStream> streams;
    streams.reserve(n_real);
    for (std::size_t i = 0; i < n_real; ++i) streams.push_back(RngStream::substream(seed, i));

    const std::size_t block = 32768;
    std::vector<double> ctab(std::min(block, nk) * np), stab(std::min(block, nk) * np);
    std::vector<double> chol, z(m), A(m), B(m);

    for (std::size_t k0 = 0; k0 < nk; k0 += block) {
        const std::size_t k1 = std::min(k0 + block, nk);
        const std::size_t nb = k1 - k0;
        // trig tables and per-mode Cholesky factors for this block
        std::vector<double> chols(nb * m * m);
        std::vector<double> sqw(nb);
        for (std::size_t k = 0; k < nb; ++k) {
            const Point3 xi = modes.frequencies[k0 + k];
            for (std::size_t p = 0; p < np; ++p) {
                const double phase = dot(xi, points[p]);
                ctab[k * np + p] = std::cos(phase);
                stab[k * np + p] = std::sin(phase);
            }
            const double r = xi.norm();
            std::vector<double> cov = mode_time_covariance(r, times);
            std::vector<double> L = detail::cholesky_psd(std::move(cov), m);
            std::copy(L.begin(), L.end(), chols.begin() + k * m * m);
            sqw[k] = std::sqrt(std::max(0.0, modes.weights[k0 + k]));
        }
        for (std::size_t i = 0; i < n_real; ++i) {
            RngStream& rng = streams[i];
            double* ui = &out.values[i * m * np];
            for (std::size_t k = 0; k < nb; ++k) {
                const double* L = &chols[k * m * m];
                for (std::size_t j = 0; j < m; ++j) z[j] = rng.gaussian();
                for (std::size_t j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (std::size_t l = 0; l <= j; ++l) s += L[j * m + l] * z[l];
                    A[j] = sqw[k] * s;
                }
                for (std::size_t j = 0; j < m; ++j) z[j] = rng.gaussian();
                for (std::size_t j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (std::size_t l = 0; l <= j; ++l) s += L[j * m + l] * z[l];
                    B[j] = sqw[k] * s;
                }
                const double* c = &ctab[k * np];
                const double* sn = &stab[k * np];
                for (std::size_t j = 0; j < m; ++j) {
                    double* row = ui + j * np;
                    const double aj = A[j], bj = B[j];
                    for (std::size_t p = 0; p < np; ++p) row[p] += c[p] * aj + sn[p] * bj;
                }
            }
        }
    }
    return out;
}

/// Truncated analytic covariance E u(t_j, x) u(t_l, y) implied by a mode set.
inline double truncated_covariance(const ModeSet& modes, double tj, double tl, Point3 x, Point3 y) {
    std::vector<double> terms(modes.size());
    const Point3 d = x - y;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const Point3 xi = modes.frequencies[k];
        terms[k] = modes.weights[k] * std::cos(dot(xi, d)) *
                   mode_time_covariance_entry(xi.norm(), tj, tl);
    }
    return pairwise_sum(terms);
}

/// Truncated analytic variogram at time t for a lag vector.
inline double truncated_variogram(const ModeSet& modes, double t, Point3 lag) {
    std::vector<double> terms(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const Point3 xi = modes.frequencies[k];
        terms[k] = 2.0 * modes.weights[k] * one_minus_cos(dot(xi, lag)) *
                   mode_time_covariance_entry(xi.norm(), t, t);
    }
    return pairwise_sum(terms);
}

// ---------------------------------------------------------------------------
// Empirical variogram and exponent estimation
// ---------------------------------------------------------------------------

inline VariogramCurve empirical_variogram(const FieldSample& sample, std::size_t t_index,
                                          Point3 direction, const std::vector<double>& lags) {
    if (t_index >= sample.times.size()) throw std::invalid_argument("empirical_variogram: bad time index");
    const Point3 dir = normalized(direction);
    auto find_point = [&](Point3 target) -> std::ptrdiff_t {
        for (std::size_t p = 0; p < sample.points.size(); ++p)
            if ((sample.points[p] - target).norm() < 1e-10) return static_cast<std::ptrdiff_t>(p);
        return -1;
    };
    const std::ptrdiff_t base = find_point(Point3{0, 0, 0});
    std::ostringstream missing;
    if (base < 0) missing << " base(0,0,0)";
    std::vector<std::ptrdiff_t> idx(lags.size());
    for (std::size_t l = 0; l < lags.size(); ++l) {
        idx[l] = find_point(lags[l] * dir);
        if (idx[l] < 0) missing << " lag=" << lags[l];
    }
    if (base < 0 || missing.tellp() > 0)
        throw std::invalid_argument("empirical_variogram: missing grid points:" + missing.str());

    VariogramCurve c;
    c.lags = lags;
    c.direction = dir;
    c.method = "mc";
    const std::size_t n = sample.n_real;
    for (std::size_t l = 0; l < lags.size(); ++l) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sample.at(i, t_index, static_cast<std::size_t>(idx[l])) -
                             sample.at(i, t_index, static_cast<std::size_t>(base));
            sq[i] = d * d;
        }
        const double mean = pairwise_sum(sq) / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (sq[i] - mean) * (sq[i] - mean);
        var /= static_cast<double>(n > 1 ? n - 1 : 1);
        c.values.push_back(mean);
        c.stderrs.push_back(std::sqrt(var / static_cast<double>(n)));
    }
    return c;
}

struct HolderEstimate {
    ExponentFit fit;
    double holder = 0.0;  // fit.slope / 2
};

inline HolderEstimate estimate_holder(const VariogramCurve& curve, double window_lo, double window_hi) {
    HolderEstimate e;
    e.fit = fit_exponent(curve.lags, curve.values, window_lo, window_hi);
    e.holder = 0.5 * e.fit.slope;
    return e;
}

inline HolderEstimate estimate_holder(const VariogramCurve& curve) {
    if (curve.lags.empty()) throw std::invalid_argument("estimate_holder: empty curve");
    double lo = curve.lags.front(), hi = curve.lags.front();
    for (double l : curve.lags) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    return estimate_holder(curve, lo, hi);
}

}  // namespace wavecov
