#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecov/gauss.hpp"
#include "wavecov/geometry.hpp"
#include "wavecov/quadrature.hpp"

namespace wavecov {

enum class KernelFamily { Riesz, Bessel, FractionalProduct, SmoothedRiesz };

inline const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Riesz: return "riesz";
        case KernelFamily::Bessel: return "bessel";
        case KernelFamily::FractionalProduct: return "fractional";
        case KernelFamily::SmoothedRiesz: return "smoothed_riesz";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Normalization constants, pinned by the convention
//     F phi(xi) = int phi(x) e^{-i xi.x} dx,   int f phi dx = int (F phi) dmu,
// so that mu = (2 pi)^{-3} F f. They are validated end to end by the dual
// physical/spectral computation of the shell correlation functional, never
// trusted as literals.
// ---------------------------------------------------------------------------
namespace constants {

/// F[|x|^{-beta}] = c3(beta) |xi|^{beta-3} in R^3.
inline double riesz_c3(double beta) {
    return std::pow(2.0, 3.0 - beta) * std::pow(pi, 1.5) * std::tgamma((3.0 - beta) / 2.0) /
           std::tgamma(beta / 2.0);
}

/// F[H(2H-1)|x|^{2H-2}] = c1(H) |xi|^{1-2H} on the line.
inline double fractional_c1(double hurst) {
    return std::tgamma(2.0 * hurst + 1.0) * std::sin(pi * hurst);
}

/// Bessel kernel spectral constant: density = cB(alpha) (1+|xi|^2)^{-alpha/2},
/// from the Gaussian subordination of the kernel.
inline double bessel_cb(double alpha) { return std::tgamma(alpha / 2.0) / std::pow(pi, 1.5); }

/// Product kernel amplitude c_H = prod H_i (2 H_i - 1).
inline double fractional_ch(const std::array<double, 3>& h) {
    return h[0] * (2 * h[0] - 1) * h[1] * (2 * h[1] - 1) * h[2] * (2 * h[2] - 1);
}

}  // namespace constants

// ---------------------------------------------------------------------------
// Predicted regularity exponents (suprema of the admissible ranges).
// Fields the source analysis does not assert for a family stay empty.
// ---------------------------------------------------------------------------
struct PredictedExponents {
    std::optional<double> kappa_bar;
    std::optional<double> nu_sup;           // capped at 1 (condition NU admits nu <= 1)
    std::optional<double> nu_growth;        // exact small-ball growth exponent (uncapped)
    std::optional<double> gamma_sup;
    std::optional<double> gamma_prime_sup;
    std::optional<double> rho1_sup;
    std::optional<double> rho2_sup;
    std::optional<std::array<double, 3>> per_direction_space;
};

namespace detail {

/// Monotone cubic (Fritsch-Carlson) interpolant on a uniform grid.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(double x0, double dx, std::vector<double> y) : x0_(x0), dx_(dx), y_(std::move(y)) {
        const std::size_t n = y_.size();
        if (n < 3) throw std::invalid_argument("MonotoneCubic: need >= 3 nodes");
        m_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / dx_;
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = 0.5 * (d[i - 1] + d[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
            } else {
                const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
                const double s = a * a + b * b;
                if (s > 9.0) {
                    const double tau = 3.0 / std::sqrt(s);
                    m_[i] = tau * a * d[i];
                    m_[i + 1] = tau * b * d[i];
                }
            }
        }
    }

    double operator()(double x) const {
        const std::size_t n = y_.size();
        double u = (x - x0_) / dx_;
        if (u <= 0.0) return y_.front();
        if (u >= static_cast<double>(n - 1)) return y_.back();
        const std::size_t i = static_cast<std::size_t>(u);
        const double t = u - static_cast<double>(i);
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * dx_ * m_[i] + h01 * y_[i + 1] + h11 * dx_ * m_[i + 1];
    }

    double x_max() const { return x0_ + dx_ * static_cast<double>(y_.size() - 1); }

  private:
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<double> y_, m_;
};

/// e^{-(R-r)^2} - e^{-(R+r)^2}, evaluated without cancellation.
inline double gauss_shell_diff(double R, double r) {
    const double x = 2.0 * R * r;
    if (x < 1.0) return 2.0 * std::exp(-R * R - r * r) * std::sinh(x);
    const double a = R - r, b = R + r;
    return std::exp(-a * a) - std::exp(-b * b);
}

/// Smoothed Riesz profile by direct radial quadrature: the polar angle of
/// the 3-D convolution integrates in closed form, leaving
///   f(R) = (pi/R) int_0^inf r^{1-beta} [e^{-(R-r)^2} - e^{-(R+r)^2}] dr.
inline double smoothed_riesz_direct(double R, double beta, int n = 24) {
    if (R < 1e-8) {
        const double g3 = std::tgamma((3.0 - beta) / 2.0);
        return 2.0 * pi * g3;
    }
    Rule1D rule;
    const double hi = R + 9.0;
    append_rule(rule, absorbed_panel(0.0, 1.0, 1.0 - beta, true, n));
    double a = 1.0;
    while (a < hi) {
        const double b = std::min(a + 1.0, hi);
        append_rule(rule, panel(a, b, n));
        a = b;
    }
    const double v = apply_rule(rule, [&](double r) { return std::pow(r, 1.0 - beta) * gauss_shell_diff(R, r); });
    return pi / R * v;
}

struct KernelImpl;
void certify_h2(KernelImpl& k);
std::shared_ptr<const KernelImpl> make_impl(KernelFamily fam, double beta, double alpha,
                                            std::array<double, 3> h, bool constants);

}  // namespace detail

// ---------------------------------------------------------------------------
// SpectralDensity
// ---------------------------------------------------------------------------

/// Density of the spectral measure mu of a kernel, with the constants of the
/// pinned Fourier convention when the owning KernelSpec carries constants.
/// Immutable; (H2)-integrability is certified at construction.
class SpectralDensity {
  public:
    double operator()(Point3 xi) const {
        if (axis_singular_) {
            if (xi.x1 == 0.0 || xi.x2 == 0.0 || xi.x3 == 0.0)
                throw std::domain_error("spectral density singular on coordinate planes");
            return axis_prefactor_ * std::pow(std::abs(xi.x1), axis_exponents_[0]) *
                   std::pow(std::abs(xi.x2), axis_exponents_[1]) *
                   std::pow(std::abs(xi.x3), axis_exponents_[2]);
        }
        return radial(xi.norm());
    }

    double radial(double r) const {
        if (axis_singular_) throw std::logic_error("axis-singular density has no radial profile");
        if (r <= 0.0 && radial_singularity_exponent_ > 0.0)
            throw std::domain_error("spectral density singular at the origin");
        return radial_(r);
    }

    double radial_singularity_exponent() const { return radial_singularity_exponent_; }
    double tail_decay_exponent() const { return tail_decay_exponent_; }
    double tail_coeff() const { return tail_coeff_; }
    bool axis_singular() const { return axis_singular_; }
    const std::array<double, 3>& axis_exponents() const { return axis_exponents_; }
    double axis_prefactor() const { return axis_prefactor_; }

    /// Certified value of int density/(1+|xi|^2) dxi (condition (H2)).
    double h2_integral() const { return h2_integral_; }
    const Certificate& h2_certificate() const { return h2_certificate_; }

    DensityView view() const {
        DensityView v;
        v.radial = radial_;
        v.pointwise = [this](Point3 xi) { return (*this)(xi); };
        v.singularity_exponent = radial_singularity_exponent_;
        v.tail_exponent = tail_decay_exponent_;
        v.tail_coeff = tail_coeff_;
        v.axis_singular = axis_singular_;
        v.axis_exponents = axis_exponents_;
        v.axis_prefactor = axis_prefactor_;
        return v;
    }

  private:
    friend struct detail::KernelImpl;
    friend void detail::certify_h2(detail::KernelImpl&);
    friend std::shared_ptr<const detail::KernelImpl> detail::make_impl(KernelFamily, double, double,
                                                                       std::array<double, 3>, bool);
    std::function<double(double)> radial_;
    double radial_singularity_exponent_ = 0.0;
    double tail_decay_exponent_ = 0.0;
    double tail_coeff_ = 0.0;
    bool axis_singular_ = false;
    std::array<double, 3> axis_exponents_{0, 0, 0};
    double axis_prefactor_ = 1.0;
    double h2_integral_ = 0.0;
    Certificate h2_certificate_;
};

namespace detail {

struct KernelImpl {
    KernelFamily family;
    double beta = 0.0;   // Riesz / SmoothedRiesz
    double alpha = 0.0;  // Bessel
    std::array<double, 3> hurst{0, 0, 0};
    bool include_constants = true;
    bool scaling_warning = false;  // fractional with H1+H2+H3 <= 2
    double origin_singularity_exponent = 0.0;
    MonotoneCubic smoothed_cache;  // SmoothedRiesz only, eager
    SpectralDensity density;

    // angular exponents of f itself (fractional), for shell quadrature
    std::array<double, 3> f_axis_exponents{0, 0, 0};
    double f_prefactor = 1.0;
};

/// Bessel kernel profile by half-line quadrature in log coordinates.
/// The integrand is evaluated through a single exp of the assembled
/// exponent so extreme subexpressions cannot overflow pairwise.
inline double bessel_profile(double r, double alpha, int n = 20) {
    const double nu = 0.5 * (alpha - 5.0);
    double u_lo;
    if (r > 0.0)
        u_lo = std::log(r * r / 180.0);
    else
        u_lo = -84.0 / (alpha - 1.0);
    u_lo = std::min(u_lo, -2.0);
    const double u_hi = std::log(60.0 + 2.0 * r);
    Rule1D rule;
    double a = u_lo;
    while (a < u_hi) {
        const double b = std::min(a + 2.0, u_hi);
        append_rule(rule, panel(a, b, n));
        a = b;
    }
    const double quarter_r2 = 0.25 * r * r;
    return apply_rule(rule, [&](double u) {
        double ex = (nu + 1.0) * u - std::exp(u);
        if (r > 0.0) ex -= quarter_r2 * std::exp(-u);
        return std::exp(ex);
    });
}

inline void validate_riesz(double beta) {
    if (!(beta > 0.0 && beta < 2.0))
        throw std::invalid_argument("riesz: beta must lie in (0,2), got " + std::to_string(beta));
}

inline void validate_bessel(double alpha) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("bessel: alpha must be > 1, got " + std::to_string(alpha));
}

inline void validate_hurst(const std::array<double, 3>& h) {
    for (double hi : h)
        if (!(hi > 0.5 && hi < 1.0))
            throw std::invalid_argument("fractional: each Hurst index must lie in (1/2,1), got " +
                                        std::to_string(hi));
}

/// Power-law tail correction for int_L^inf A r^{-q} dr type remainders.
inline double power_tail(double A, double q, double L) { return A * std::pow(L, 1.0 - q) / (q - 1.0); }

inline void certify_h2(KernelImpl& k) {
    // int density/(1+|xi|^2) dxi, radially reduced, with an analytic
    // power-tail correction added as a value and its next order as the bound.
    SpectralDensity& d = k.density;
    if (k.family == KernelFamily::FractionalProduct && k.hurst[0] + k.hurst[1] + k.hurst[2] <= 2.0) {
        // spectral mass is not square-propagator-integrable; the kernel is
        // constructible (warning flag set) but carries no (H2) certificate
        d.h2_integral_ = std::numeric_limits<double>::infinity();
        d.h2_certificate_ = Certificate{};
        return;
    }
    QuadratureSpec spec;
    spec.tolerance = 1e-5;
    spec.radial_nodes = 512;
    const double cut = 1e4;
    auto eval = [&](const QuadratureSpec& s) -> double {
        Rule1D rad;
        const int n_in = std::max(12, s.radial_nodes / 8);
        const int n_log = std::max(8, s.radial_nodes / 16);
        const double p = d.axis_singular_
                             ? -(d.axis_exponents_[0] + d.axis_exponents_[1] + d.axis_exponents_[2])
                             : d.radial_singularity_exponent_;
        append_rule(rad, detail::head_panel(1.0, p, n_in));
        append_log_panels(rad, 1.0, cut, n_log);
        if (d.axis_singular_) {
            WeightedOctantRule oct = WeightedOctantRule::build(d.axis_exponents_, std::max(8, s.sphere_order));
            const double ang = oct.total_weight();
            const double sum_a = d.axis_exponents_[0] + d.axis_exponents_[1] + d.axis_exponents_[2];
            return apply_rule(rad, [&](double r) {
                return d.axis_prefactor_ * ang * std::pow(r, sum_a + 2.0) / (1.0 + r * r);
            });
        }
        return four_pi * apply_rule(rad, [&](double r) { return d.radial_(r) * r * r / (1.0 + r * r); });
    };
    Certificate c = certify(spec, eval);
    // analytic tail: isotropic integrand ~ 4 pi tail_coeff r^{-q};
    // product density ~ (angular mass) * pref * r^{-(1+2 kappa_bar)}
    double tail, q_eff;
    if (d.axis_singular_) {
        const double kbar = k.hurst[0] + k.hurst[1] + k.hurst[2] - 2.0;
        const double ang = WeightedOctantRule::build(d.axis_exponents_, 24).total_weight();
        q_eff = 1.0 + 2.0 * kbar;
        tail = power_tail(d.axis_prefactor_ * ang, q_eff, cut);
    } else {
        q_eff = d.tail_decay_exponent_;
        tail = four_pi * power_tail(d.tail_coeff_, q_eff, cut);
    }
    c.value += tail;
    c.coarse_value += tail;
    c.tail_bound = std::abs(tail) * (q_eff + 2.0) / (cut * cut);
    c.cutoff_used = cut;
    if (!std::isfinite(c.value)) throw std::runtime_error("(H2) certification integral is not finite");
    d.h2_integral_ = c.value;
    d.h2_certificate_ = c;
}

inline std::shared_ptr<const KernelImpl> make_impl(KernelFamily fam, double beta, double alpha,
                                                   std::array<double, 3> h, bool constants) {
    auto k = std::make_shared<KernelImpl>();
    k->family = fam;
    k->beta = beta;
    k->alpha = alpha;
    k->hurst = h;
    k->include_constants = constants;
    SpectralDensity& d = k->density;
    switch (fam) {
        case KernelFamily::Riesz: {
            validate_riesz(beta);
            k->origin_singularity_exponent = beta;
            const double c = constants ? constants::riesz_c3(beta) / std::pow(2.0 * pi, 3.0) : 1.0;
            d.radial_ = [c, beta](double r) { return c * std::pow(r, beta - 3.0); };
            d.radial_singularity_exponent_ = 3.0 - beta;
            d.tail_decay_exponent_ = 3.0 - beta;
            d.tail_coeff_ = c;
            break;
        }
        case KernelFamily::Bessel: {
            validate_bessel(alpha);
            k->origin_singularity_exponent = std::max(0.0, 3.0 - alpha);
            const double c = constants ? constants::bessel_cb(alpha) : 1.0;
            d.radial_ = [c, alpha](double r) { return c * std::pow(1.0 + r * r, -alpha / 2.0); };
            d.radial_singularity_exponent_ = 0.0;
            d.tail_decay_exponent_ = alpha;
            d.tail_coeff_ = c;
            break;
        }
        case KernelFamily::SmoothedRiesz: {
            validate_riesz(beta);
            k->origin_singularity_exponent = 0.0;  // convolution with the Gaussian is bounded
            const double c3 = constants::riesz_c3(beta);
            const double c = constants ? c3 * std::pow(pi, 1.5) / std::pow(2.0 * pi, 3.0) : 1.0;
            d.radial_ = [c, beta](double r) { return c * std::exp(-r * r / 4.0) * std::pow(r, beta - 3.0); };
            d.radial_singularity_exponent_ = 3.0 - beta;
            d.tail_decay_exponent_ = 50.0;  // Gaussian; any large power under-states the decay
            d.tail_coeff_ = 0.0;
            // eager radial cache of the physical profile
            {
                const double dx = 0.01, xmax = 16.0;
                const std::size_t n = static_cast<std::size_t>(xmax / dx) + 1;
                std::vector<double> y(n);
                for (std::size_t i = 0; i < n; ++i) y[i] = smoothed_riesz_direct(dx * static_cast<double>(i), beta);
                k->smoothed_cache = MonotoneCubic(0.0, dx, std::move(y));
            }
            break;
        }
        case KernelFamily::FractionalProduct: {
            validate_hurst(h);
            const double kbar = h[0] + h[1] + h[2] - 2.0;
            k->scaling_warning = kbar <= 0.0;
            k->origin_singularity_exponent = 6.0 - 2.0 * (h[0] + h[1] + h[2]);  // radial envelope of the product
            k->f_axis_exponents = {2 * h[0] - 2, 2 * h[1] - 2, 2 * h[2] - 2};
            k->f_prefactor = constants ? constants::fractional_ch(h) : 1.0;
            d.axis_singular_ = true;
            d.axis_exponents_ = {1 - 2 * h[0], 1 - 2 * h[1], 1 - 2 * h[2]};
            // with constants: mu = (2pi)^{-3} F[c_H prod |x_i|^{2H_i-2}]
            //               = prod_i c1(H_i)/(2pi) |xi_i|^{1-2H_i};
            // without: the bare shape prod |xi_i|^{1-2H_i}.
            double pref = 1.0;
            if (constants)
                for (double hi : h) pref *= constants::fractional_c1(hi) / (2.0 * pi);
            d.axis_prefactor_ = pref;
            d.tail_decay_exponent_ = 1.0 + 2.0 * kbar;  // radial decay of the angular average
            d.tail_coeff_ = 0.0;  // tails are handled by the fractional moment integrators
            break;
        }
    }
    certify_h2(*k);
    return k;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// KernelSpec
// ---------------------------------------------------------------------------

/// A covariance kernel family with parameters. Immutable after construction;
/// copies are cheap. With `constants` set, both the physical kernel and the
/// spectral density carry the normalization constants of the pinned Fourier
/// convention (including c_H for the product kernel).
class KernelSpec {
  public:
    static KernelSpec riesz(double beta, bool constants = true) {
        return KernelSpec(detail::make_impl(KernelFamily::Riesz, beta, 0, {0, 0, 0}, constants));
    }
    static KernelSpec bessel(double alpha, bool constants = true) {
        return KernelSpec(detail::make_impl(KernelFamily::Bessel, 0, alpha, {0, 0, 0}, constants));
    }
    static KernelSpec smoothed_riesz(double beta, bool constants = true) {
        return KernelSpec(detail::make_impl(KernelFamily::SmoothedRiesz, beta, 0, {0, 0, 0}, constants));
    }
    static KernelSpec fractional(double h1, double h2, double h3, bool constants = true) {
        return KernelSpec(detail::make_impl(KernelFamily::FractionalProduct, 0, 0, {h1, h2, h3}, constants));
    }

    KernelFamily family() const { return impl_->family; }
    double beta() const { return impl_->beta; }
    double alpha() const { return impl_->alpha; }
    const std::array<double, 3>& hurst() const { return impl_->hurst; }
    bool include_constants() const { return impl_->include_constants; }
    bool scaling_warning() const { return impl_->scaling_warning; }
    bool isotropic() const { return impl_->family != KernelFamily::FractionalProduct; }
    double origin_singularity_exponent() const { return impl_->origin_singularity_exponent; }
    const SpectralDensity& spectral_density() const { return impl_->density; }

    double kappa_bar() const {
        return impl_->hurst[0] + impl_->hurst[1] + impl_->hurst[2] - 2.0;
    }

    /// Kernel value; +infinity exactly on the singular set.
    double eval_f(Point3 x) const {
        const auto& k = *impl_;
        switch (k.family) {
            case KernelFamily::Riesz:
            case KernelFamily::Bessel:
            case KernelFamily::SmoothedRiesz:
                return radial_profile(x.norm());
            case KernelFamily::FractionalProduct: {
                if (x.x1 == 0.0 || x.x2 == 0.0 || x.x3 == 0.0)
                    return std::numeric_limits<double>::infinity();
                return k.f_prefactor * std::pow(std::abs(x.x1), k.f_axis_exponents[0]) *
                       std::pow(std::abs(x.x2), k.f_axis_exponents[1]) *
                       std::pow(std::abs(x.x3), k.f_axis_exponents[2]);
            }
        }
        return 0.0;
    }

    /// Radial profile f(r) for the isotropic families.
    double radial_profile(double r) const {
        const auto& k = *impl_;
        switch (k.family) {
            case KernelFamily::Riesz:
                if (r <= 0.0) return std::numeric_limits<double>::infinity();
                return std::pow(r, -k.beta);
            case KernelFamily::Bessel: {
                if (r <= 0.0) {
                    if (k.alpha <= 3.0) return std::numeric_limits<double>::infinity();
                    return std::tgamma((k.alpha - 3.0) / 2.0);
                }
                return detail::bessel_profile(r, k.alpha);
            }
            case KernelFamily::SmoothedRiesz: {
                if (r <= k.smoothed_cache.x_max()) return k.smoothed_cache(r);
                // asymptotically the mollifier mass concentrates: f ~ pi^{3/2} r^{-beta}
                const double b = k.beta;
                return std::pow(pi, 1.5) * std::pow(r, -b) * (1.0 + b * (b - 1.0) / (4.0 * r * r));
            }
            case KernelFamily::FractionalProduct:
                throw std::logic_error("fractional product kernel has no radial profile");
        }
        return 0.0;
    }

    /// Angular decomposition of f for shell quadrature (fractional family).
    std::array<double, 3> f_axis_exponents() const { return impl_->f_axis_exponents; }
    double f_prefactor() const { return impl_->f_prefactor; }

    PredictedExponents predicted_exponents() const {
        const auto& k = *impl_;
        PredictedExponents p;
        switch (k.family) {
            case KernelFamily::Riesz: {
                const double b = k.beta;
                p.gamma_sup = (2.0 - b) / 2.0;
                p.nu_sup = std::min(2.0 - b, 1.0);
                p.nu_growth = 2.0 - b;
                p.rho1_sup = std::min(2.0 - b, 1.0);
                p.rho2_sup = 2.0 - b;
                break;
            }
            case KernelFamily::Bessel: {
                const double a = k.alpha;
                p.gamma_sup = std::min(a - 1.0, 1.0);
                p.gamma_prime_sup = std::min(a - 1.0, 2.0);
                p.nu_sup = std::min(a - 1.0, 1.0);
                p.nu_growth = std::min(a - 1.0, 2.0);
                p.rho1_sup = std::min(a - 1.0, 1.0);
                p.rho2_sup = std::min(a - 1.0, 2.0);
                break;
            }
            case KernelFamily::SmoothedRiesz: {
                p.gamma_sup = std::min((3.0 - k.beta) / 2.0, 1.0);
                p.nu_growth = 2.0;  // bounded kernel: the ball integral scales like h^2
                break;
            }
            case KernelFamily::FractionalProduct: {
                const double kb = kappa_bar();
                p.kappa_bar = kb;
                if (kb > 0.0) {
                    std::array<double, 3> per{};
                    for (int i = 0; i < 3; ++i) per[i] = std::min(k.hurst[i] - 0.5, kb);
                    p.per_direction_space = per;
                    p.gamma_sup = std::min({per[0], per[1], per[2]});
                    p.nu_sup = std::min(2.0 * kb, 1.0);
                    const double r =
                        std::min({2 * k.hurst[0] - 1, 2 * k.hurst[1] - 1, 2 * k.hurst[2] - 1, 2 * kb});
                    p.rho1_sup = std::min(r, 1.0);
                    p.rho2_sup = std::min(r, 2.0);
                }
                p.nu_growth = 2.0 * kb;
                break;
            }
        }
        return p;
    }

  private:
    explicit KernelSpec(std::shared_ptr<const detail::KernelImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const detail::KernelImpl> impl_;
};

inline double eval_f(const KernelSpec& k, Point3 x) { return k.eval_f(x); }
inline double eval_spectral_density(const KernelSpec& k, Point3 xi) { return k.spectral_density()(xi); }
inline PredictedExponents predicted_exponents(const KernelSpec& k) { return k.predicted_exponents(); }

}  // namespace wavecov
