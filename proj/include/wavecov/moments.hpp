#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "wavecov/geometry.hpp"
#include "wavecov/kernels.hpp"
#include "wavecov/quadrature.hpp"

namespace wavecov {

enum class MomentMethod { Physical, Spectral };

struct MomentResult {
    double value = 0.0;
    Certificate certificate;
    MomentMethod method = MomentMethod::Spectral;
};

// ---------------------------------------------------------------------------
// Time kernels: every s-integral of the squared propagator is carried out in
// closed form first, so each moment is a single spectral integral. The
// closed forms are written in product form (sinc-based), which is stable for
// all arguments; the raw two-level quadrature oracles live in the test suite.
// ---------------------------------------------------------------------------

namespace timekernel {

/// g0(theta) = (1 - sinc theta)/theta^2, the profile of the variance kernel.
inline double g0(double theta) {
    if (std::abs(theta) < 0.5) {
        const double t2 = theta * theta;
        return (1.0 / 6.0) - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0;
    }
    return one_minus_sinc(theta) / (theta * theta);
}

/// int_0^t sin^2((t-s) r) ds / r^2  =  [t - sin(2 t r)/(2 r)] / (2 r^2).
inline double variance(double t, double r) { return 2.0 * t * t * t * g0(2.0 * t * r); }

/// Same integral without the 1/2: the variogram weight [t - sin(2tr)/(2r)]/r^2.
inline double variogram(double t, double r) { return 4.0 * t * t * t * g0(2.0 * t * r); }

/// int_0^t (sin((tbar-s) r) - sin((t-s) r))^2 ds / r^2
///   = (h^2 t / 2) sinc^2(h r / 2) (1 + cos(tbar r) sinc(t r)),  h = tbar - t.
inline double second_difference(double t, double tbar, double r) {
    const double h = tbar - t;
    const double sc = sinc(0.5 * h * r);
    return 0.5 * h * h * t * sc * sc * (1.0 + std::cos(tbar * r) * sinc(t * r));
}

/// sin(s r) sin(t r) / r^2.
inline double cross(double s, double t, double r) { return s * t * sinc(s * r) * sinc(t * r); }

}  // namespace timekernel

namespace detail {

/// Radial integrand description for one spectral moment.
struct IsoMoment {
    std::function<double(double)> k;  // integrand factor K(r); integral is int rho(r) r^2 K(r) * 4pi dr
    double mean_coeff = 0.0;          // K -> mean_coeff / r^2 (non-oscillatory part of the tail)
    double osc_coeff = 0.0;           // |K - mean/r^2| <= osc_coeff / r^3 at the tail, after averaging
    double feature = 1.0;             // smallest oscillation period scale; extends the cutoff
    double max_freq = 0.0;            // largest angular frequency of K; caps the panel widths
};

inline double effective_cutoff(const QuadratureSpec& spec, double feature, double support) {
    const double osc_guard = 64.0;
    double cut = std::max(spec.radial_cutoff, osc_guard / std::max(feature, 1e-7));
    cut = std::min(cut, 1e8);
    return std::min(cut, support);
}

inline Rule1D moment_radial_rule(double p_at_zero, double cutoff, double max_freq,
                                 const QuadratureSpec& spec) {
    Rule1D r;
    const int n_in = std::max(12, spec.radial_nodes / 8);
    const int n_log = std::max(12, spec.radial_nodes / 16);
    append_rule(r, wavecov::detail::head_panel(std::min(spec.split_radius, cutoff), p_at_zero, n_in));
    if (cutoff > spec.split_radius)
        wavecov::detail::append_capped_panels(r, spec.split_radius, cutoff, n_log, max_freq);
    return r;
}

/// Isotropic kernels: the angular integral is exact (4 pi or 4 pi sinc),
/// already folded into K.
inline Certificate iso_spectral_moment(const KernelSpec& kernel, const IsoMoment& m,
                                       const QuadratureSpec& spec) {
    const SpectralDensity& d = kernel.spectral_density();
    const double support = (kernel.family() == KernelFamily::SmoothedRiesz) ? 60.0 : 1e300;
    const double cutoff = effective_cutoff(spec, m.feature, support);
    auto eval = [&](const QuadratureSpec& s) -> double {
        Rule1D rad = moment_radial_rule(d.radial_singularity_exponent(), cutoff, m.max_freq, s);
        return four_pi * apply_rule(rad, [&](double r) { return d.radial(r) * r * r * m.k(r); });
    };
    Certificate c = certify(spec, eval);
    c.cutoff_used = cutoff;
    const double A = d.tail_coeff();
    if (A > 0.0) {
        const double q = d.tail_decay_exponent();
        const double tail_mean = four_pi * A * m.mean_coeff * std::pow(cutoff, 1.0 - q) / (q - 1.0);
        c.value += tail_mean;
        c.coarse_value += tail_mean;
        c.tail_bound = four_pi * A * m.osc_coeff * std::pow(cutoff, -q) / q +
                       std::abs(tail_mean) * q / (cutoff * cutoff);
    }
    return c;
}

/// Product kernel: radial rule x weighted octant rule. `angular` is the
/// smooth even-per-coordinate factor G(r, omega); nullptr means G == 1.
inline Certificate fractional_spectral_moment(const KernelSpec& kernel, const IsoMoment& m,
                                              const std::function<double(double, Point3)>& angular,
                                              const QuadratureSpec& spec) {
    const SpectralDensity& d = kernel.spectral_density();
    const double kb = kernel.kappa_bar();
    if (kb <= 0.0)
        throw std::invalid_argument("fractional moments need H1+H2+H3 > 2 (spectral mass otherwise escapes)");
    const double cutoff = effective_cutoff(spec, m.feature, 1e300);
    const double pref = d.axis_prefactor();
    auto eval = [&](const QuadratureSpec& s) -> double {
        Rule1D rad = moment_radial_rule(1.0 + 2.0 * kb, cutoff, m.max_freq, s);
        WeightedOctantRule oct = WeightedOctantRule::build(d.axis_exponents(), std::max(8, s.sphere_order));
        if (!angular) {
            const double ang_total = oct.total_weight();
            return pref * ang_total *
                   apply_rule(rad, [&](double r) { return std::pow(r, 1.0 - 2.0 * kb) * m.k(r); });
        }
        return pref * apply_rule(rad, [&](double r) {
                   const double g = oct.integrate_even([&](Point3 w) { return angular(r, w); });
                   return std::pow(r, 1.0 - 2.0 * kb) * m.k(r) * g;
               });
    };
    Certificate c = certify(spec, eval);
    c.cutoff_used = cutoff;
    const double ang_total = WeightedOctantRule::build(d.axis_exponents(), 24).total_weight();
    const double tail_mean = pref * ang_total * m.mean_coeff * std::pow(cutoff, -2.0 * kb) / (2.0 * kb);
    c.value += tail_mean;
    c.coarse_value += tail_mean;
    c.tail_bound = pref * ang_total * m.osc_coeff * std::pow(cutoff, -1.0 - 2.0 * kb) / (1.0 + 2.0 * kb) +
                   std::abs(tail_mean) * 2.0 / cutoff;
    return c;
}

inline Certificate spectral_moment(const KernelSpec& kernel, const IsoMoment& m,
                                   const std::function<double(double, Point3)>& angular,
                                   const QuadratureSpec& spec) {
    if (kernel.isotropic()) {
        if (angular) throw std::logic_error("isotropic moment must fold the angular factor into K");
        return iso_spectral_moment(kernel, m, spec);
    }
    return fractional_spectral_moment(kernel, m, angular, spec);
}

inline Certificate zero_certificate() {
    Certificate c;
    c.converged = true;
    return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Moments of the linear additive-noise solution
// ---------------------------------------------------------------------------

/// E u(t,x)^2 = int [t - sin(2t|xi|)/(2|xi|)] / (2|xi|^2) mu(dxi).
inline MomentResult variance(const KernelSpec& kernel, double t, const QuadratureSpec& spec = {}) {
    if (t < 0.0) throw std::invalid_argument("variance: t must be >= 0");
    if (t == 0.0) return {0.0, detail::zero_certificate(), MomentMethod::Spectral};
    detail::IsoMoment m;
    m.k = [t](double r) { return timekernel::variance(t, r); };
    m.mean_coeff = 0.5 * t;
    m.osc_coeff = 0.25;
    m.feature = t;
    m.max_freq = 2.0 * t;
    Certificate c = detail::spectral_moment(kernel, m, nullptr, spec);
    return {c.value, c, MomentMethod::Spectral};
}

/// E (u(t,x) - u(t,0))^2 = int (1 - cos(xi.x)) [t - sin(2t|xi|)/(2|xi|)]/|xi|^2 mu(dxi).
inline MomentResult spatial_variogram_exact(const KernelSpec& kernel, double t, Point3 x,
                                            const QuadratureSpec& spec = {}) {
    if (!(t > 0.0)) throw std::invalid_argument("spatial_variogram_exact: t must be > 0");
    const double xn = x.norm();
    if (xn == 0.0) return {0.0, detail::zero_certificate(), MomentMethod::Spectral};
    detail::IsoMoment m;
    m.mean_coeff = t;
    m.osc_coeff = t * (1.0 + 2.0 / xn) + 0.5;
    m.feature = std::min(t, xn);
    m.max_freq = 2.0 * t + xn;
    Certificate c;
    if (kernel.isotropic()) {
        m.k = [t, xn](double r) { return one_minus_sinc(r * xn) * timekernel::variogram(t, r); };
        c = detail::spectral_moment(kernel, m, nullptr, spec);
    } else {
        m.k = [t](double r) { return timekernel::variogram(t, r); };
        auto angular = [x](double r, Point3 w) {
            return 1.0 - std::cos(r * w.x1 * x.x1) * std::cos(r * w.x2 * x.x2) * std::cos(r * w.x3 * x.x3);
        };
        c = detail::spectral_moment(kernel, m, angular, spec);
    }
    return {c.value, c, MomentMethod::Spectral};
}

/// Variance of the stochastic integral over [t, tbar]: depends on tbar - t only.
inline MomentResult temporal_Z1(const KernelSpec& kernel, double t, double tbar,
                                const QuadratureSpec& spec = {}) {
    if (!(tbar >= t) || t < 0.0) throw std::invalid_argument("temporal_Z1: need tbar >= t >= 0");
    return variance(kernel, tbar - t, spec);
}

/// int_0^t ds int (sin((tbar-s)|xi|) - sin((t-s)|xi|))^2 / |xi|^2 mu(dxi).
inline MomentResult temporal_Z2(const KernelSpec& kernel, double t, double tbar,
                                const QuadratureSpec& spec = {}) {
    if (!(tbar >= t) || t < 0.0) throw std::invalid_argument("temporal_Z2: need tbar >= t >= 0");
    if (t == 0.0 || tbar == t) return {0.0, detail::zero_certificate(), MomentMethod::Spectral};
    const double h = tbar - t;
    detail::IsoMoment m;
    m.k = [t, tbar](double r) { return timekernel::second_difference(t, tbar, r); };
    m.mean_coeff = t;
    m.osc_coeff = t * (2.0 / h + 1.0 / tbar + 1.0);
    m.feature = std::min(h, t);
    m.max_freq = 2.0 * tbar;
    Certificate c = detail::spectral_moment(kernel, m, nullptr, spec);
    return {c.value, c, MomentMethod::Spectral};
}

/// E |u(t,x) - u(tbar,x)|^2 = 2 Z1 + 2 Z2 (independent of x by stationarity).
inline MomentResult temporal_increment_variance(const KernelSpec& kernel, double t, double tbar,
                                                const QuadratureSpec& spec = {}) {
    MomentResult z1 = temporal_Z1(kernel, t, tbar, spec);
    MomentResult z2 = temporal_Z2(kernel, t, tbar, spec);
    MomentResult r;
    r.value = 2.0 * z1.value + 2.0 * z2.value;
    r.certificate.value = r.value;
    r.certificate.coarse_value = 2.0 * z1.certificate.coarse_value + 2.0 * z2.certificate.coarse_value;
    r.certificate.delta = 2.0 * z1.certificate.delta + 2.0 * z2.certificate.delta;
    r.certificate.tail_bound = 2.0 * z1.certificate.tail_bound + 2.0 * z2.certificate.tail_bound;
    r.certificate.cutoff_used = std::max(z1.certificate.cutoff_used, z2.certificate.cutoff_used);
    r.certificate.converged = z1.certificate.converged && z2.certificate.converged;
    r.method = MomentMethod::Spectral;
    return r;
}

/// Spectral side of the shell correlation:
///   int int f(x-y) G(s,dx) G(t,dy) = int sin(s|xi|) sin(t|xi|)/|xi|^2 mu(dxi).
inline MomentResult shell_correlation_spectral(const KernelSpec& kernel, double s, double t,
                                               const QuadratureSpec& spec = {}) {
    if (!(s > 0.0) || !(t > 0.0))
        throw std::invalid_argument("shell_correlation_spectral: s, t must be positive");
    detail::IsoMoment m;
    m.k = [s, t](double r) { return timekernel::cross(s, t, r); };
    m.mean_coeff = (s == t) ? 0.5 : 0.0;
    m.osc_coeff = (s == t) ? 0.5 / (s + t) : 0.5 * (1.0 / std::abs(s - t) + 1.0 / (s + t));
    m.feature = std::min(s, t);
    m.max_freq = s + t;
    Certificate c = detail::spectral_moment(kernel, m, nullptr, spec);
    return {c.value, c, MomentMethod::Spectral};
}

/// Shifted variant: int int f(x-y+w) G(s,dx) G(t,dy)
///   = Re int sin(s|xi|) sin(t|xi|)/|xi|^2 e^{-i w.xi} mu(dxi);
/// reduces to the unshifted functional at w = 0 (same code path).
inline MomentResult shifted_shell_correlation(const KernelSpec& kernel, double s, double t, Point3 w,
                                              const QuadratureSpec& spec = {}) {
    if (!(s > 0.0) || !(t > 0.0))
        throw std::invalid_argument("shifted_shell_correlation: s, t must be positive");
    const double wn = w.norm();
    if (wn == 0.0) return shell_correlation_spectral(kernel, s, t, spec);
    detail::IsoMoment m;
    m.mean_coeff = 0.0;
    m.osc_coeff = 1.0 / wn + 1.0 / std::min(s, t);
    m.feature = std::min(std::min(s, t), wn);
    m.max_freq = s + t + wn;
    Certificate c;
    if (kernel.isotropic()) {
        m.k = [s, t, wn](double r) { return sinc(r * wn) * timekernel::cross(s, t, r); };
        c = detail::spectral_moment(kernel, m, nullptr, spec);
    } else {
        m.k = [s, t](double r) { return timekernel::cross(s, t, r); };
        auto angular = [w](double r, Point3 om) {
            return std::cos(r * om.x1 * w.x1) * std::cos(r * om.x2 * w.x2) * std::cos(r * om.x3 * w.x3);
        };
        c = detail::spectral_moment(kernel, m, angular, spec);
    }
    return {c.value, c, MomentMethod::Spectral};
}

}  // namespace wavecov
