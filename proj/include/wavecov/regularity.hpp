#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wavecov/fit.hpp"
#include "wavecov/geometry.hpp"
#include "wavecov/kernels.hpp"
#include "wavecov/quadrature.hpp"

namespace wavecov {

enum class ConditionId { H1, H2, SP1, SP2, TC1, TC2, NU };

inline const char* condition_name(ConditionId c) {
    switch (c) {
        case ConditionId::H1: return "h1";
        case ConditionId::H2: return "h2";
        case ConditionId::SP1: return "sp1";
        case ConditionId::SP2: return "sp2";
        case ConditionId::TC1: return "tc1";
        case ConditionId::TC2: return "tc2";
        case ConditionId::NU: return "nu";
    }
    return "?";
}

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// Result of probing one integral condition over a grid of shifts/lags.
/// The fitted slope estimates the true modulus exponent, which can exceed
/// the admissible supremum; "pass" therefore means
///   slope >= predicted_sup - slack  (and a clean fit).
struct ConditionReport {
    ConditionId id = ConditionId::H1;
    std::vector<double> probe_grid;       // strictly decreasing
    std::vector<double> integral_values;  // same length
    std::optional<ExponentFit> fit;
    std::optional<double> predicted_sup;
    double slack = 0.15;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
    std::vector<Certificate> certificates;
};

/// Pure verdict logic shared by every sweep.
inline Verdict judge(const ConditionReport& r) {
    for (const Certificate& c : r.certificates)
        if (!c.converged) return Verdict::Inconclusive;
    if (!r.fit) return Verdict::Inconclusive;
    if (r.fit->r2 < 0.98) return Verdict::Fail;
    if (r.predicted_sup && r.fit->slope < *r.predicted_sup - r.slack) return Verdict::Fail;
    return Verdict::Pass;
}

// ---------------------------------------------------------------------------
// Ball integrals: (H1) and the small-ball growth condition NU
// ---------------------------------------------------------------------------

namespace detail {

/// int_{|z| <= h} f(z)/|z| dz.
inline Certificate ball_integral(const KernelSpec& kernel, double h, const QuadratureSpec& spec) {
    if (kernel.isotropic()) {
        return integrate_shell_radial([&](double r) { return kernel.radial_profile(r) / r; }, 0.0, h,
                                      kernel.origin_singularity_exponent() + 1.0, spec);
    }
    AngularStructure ang{kernel.f_axis_exponents()};
    return integrate_shell_weighted([&](Point3 z) { return kernel.eval_f(z) / z.norm(); }, 0.0, h,
                                    kernel.origin_singularity_exponent() + 1.0, spec, ang);
}

}  // namespace detail

inline ConditionReport check_H1(const KernelSpec& kernel, double radius = 1.0,
                                const QuadratureSpec& spec = {}) {
    ConditionReport r;
    r.id = ConditionId::H1;
    r.probe_grid = {radius};
    try {
        Certificate c = detail::ball_integral(kernel, radius, spec);
        r.integral_values = {c.value};
        r.certificates = {c};
        r.verdict = (c.converged && std::isfinite(c.value)) ? Verdict::Pass : Verdict::Inconclusive;
    } catch (const std::exception& e) {
        r.integral_values = {std::numeric_limits<double>::infinity()};
        r.note = e.what();
        r.verdict = Verdict::Inconclusive;
    }
    return r;
}

inline ConditionReport check_H2(const KernelSpec& kernel) {
    ConditionReport r;
    r.id = ConditionId::H2;
    const SpectralDensity& d = kernel.spectral_density();
    r.probe_grid = {d.h2_certificate().cutoff_used};
    r.integral_values = {d.h2_integral()};
    r.certificates = {d.h2_certificate()};
    r.verdict = (std::isfinite(d.h2_integral()) && d.h2_certificate().converged) ? Verdict::Pass
                                                                                 : Verdict::Fail;
    return r;
}

/// Condition NU: int_{|z|<=h} f(z)/|z| dz <= C h^nu; probes a decreasing
/// dyadic grid and fits the growth exponent.
inline ConditionReport small_ball_growth(const KernelSpec& kernel, double T,
                                         std::vector<double> probe_grid,
                                         const QuadratureSpec& spec = {}) {
    ConditionReport r;
    r.id = ConditionId::NU;
    std::sort(probe_grid.begin(), probe_grid.end(), std::greater<double>());
    if (probe_grid.empty() || probe_grid.front() > 2.0 * T)
        throw std::invalid_argument("small_ball_growth: probe grid must lie in (0, 2T]");
    r.probe_grid = probe_grid;
    const PredictedExponents pe = kernel.predicted_exponents();
    r.predicted_sup = pe.nu_sup;
    try {
        for (double h : probe_grid) {
            Certificate c = detail::ball_integral(kernel, h, spec);
            r.integral_values.push_back(c.value);
            r.certificates.push_back(c);
        }
        r.fit = fit_exponent(r.probe_grid, r.integral_values);
        r.verdict = judge(r);
    } catch (const std::exception& e) {
        r.note = e.what();
        r.verdict = Verdict::Inconclusive;
    }
    return r;
}

// ---------------------------------------------------------------------------
// L1(rho) moduli: SP1 and SP2, with rho(dz) = 1_{|z|<=2T} dz/|z|
// ---------------------------------------------------------------------------

namespace detail {

/// Inner integral of the radial reduction of SP1:
///   int_{|r-w|}^{r+w} |f(rho) - f(r)| rho drho,
/// with panels split at the kink rho = r and the power at rho ~ 0 absorbed.
template <typename Prof>
double sp1_inner(const Prof& f, double p, double r, double w, int n) {
    const double lo = std::abs(r - w), hi = r + w;
    const double fr = f(r);
    Rule1D rule;
    auto add = [&](double a, double b) {
        if (b <= a * (1.0 + 1e-15) && b - a < 1e-300) return;
        if (a < 0.05 * std::min(w, std::max(r, 1e-300)) && p > 0.0)
            append_rule(rule, absorbed_panel(a, b, 1.0 - p, true, n));
        else
            append_rule(rule, panel(a, b, n));
    };
    if (lo < r && r < hi) {
        add(lo, r);
        add(r, hi);
    } else {
        add(lo, hi);
    }
    return apply_rule(rule, [&](double rho) { return std::abs(f(rho) - fr) * rho; });
}

template <typename Prof>
double sp1_radial_value(const Prof& f, double p, double w, double T, const QuadratureSpec& spec) {
    const int n = std::max(8, spec.radial_nodes / 16);
    auto inner = [&](double r) { return sp1_inner(f, p, r, w, n); };
    double total = 0.0;
    // r-panels: absorbed head below w/2, structure breaks at w and 2w
    {
        Rule1D head = absorbed_panel(0.0, 0.5 * w, std::max(1.0 - p, -0.9), true, n);
        total += apply_rule(head, inner);
    }
    for (double a : {0.5 * w, w}) {
        Rule1D mid = panel(a, 2.0 * a, n);
        total += apply_rule(mid, inner);
    }
    if (2.0 * w < 2.0 * T) {
        Rule1D tail;
        append_log_panels(tail, 2.0 * w, 2.0 * T, n);
        total += apply_rule(tail, inner);
    }
    return 2.0 * pi / w * total;
}

/// Radial reduction of SP2: 2 pi int_0^{2T} r int_{-1}^{1} |f(r+) + f(r-) - 2 f(r)| du dr
/// with r(+/-)^2 = r^2 + w^2 +/- 2 r w u; graded in u toward the near-zero
/// arguments at u ~ +-1 when r ~ w.
template <typename Prof>
double sp2_radial_value(const Prof& f, double p, double w, double T, const QuadratureSpec& spec) {
    const int n = std::max(8, spec.radial_nodes / 16);
    auto inner = [&](double r) {
        const double fr = f(r);
        const double delta = (r - w) * (r - w) / (2.0 * r * w + 1e-300);
        const double vpeak = std::min(std::max(4.0 * delta, 1e-10), 0.5);
        double tot = 0.0;
        for (double sgn : {1.0, -1.0}) {
            Rule1D rule;
            append_rule(rule, panel(0.0, vpeak, n));
            double lo = vpeak;
            while (lo < 1.0 - 1e-15) {
                const double hi = std::min(4.0 * lo, 1.0);
                append_rule(rule, panel(lo, hi, n));
                lo = hi;
            }
            tot += apply_rule(rule, [&](double v) {
                const double u = (1.0 - v) * sgn;
                const double rp = std::sqrt(std::max(r * r + w * w + 2.0 * r * w * u, 1e-300));
                const double rm = std::sqrt(std::max(r * r + w * w - 2.0 * r * w * u, 1e-300));
                return std::abs(f(rp) + f(rm) - 2.0 * fr);
            });
        }
        return tot;
    };
    double total = 0.0;
    {
        Rule1D head = absorbed_panel(0.0, 0.5 * w, std::max(1.0 - p, -0.9), true, n);
        total += apply_rule(head, [&](double r) { return r * inner(r); });
    }
    for (double a : {0.5 * w, w}) {
        Rule1D mid = panel(a, 2.0 * a, n);
        total += apply_rule(mid, [&](double r) { return r * inner(r); });
    }
    if (2.0 * w < 2.0 * T) {
        Rule1D tail;
        append_log_panels(tail, 2.0 * w, 2.0 * T, n);
        total += apply_rule(tail, [&](double r) { return r * inner(r); });
    }
    return 2.0 * pi * total;
}

/// 3-D fallback for non-radial kernels: plain sphere rule x radial panels.
template <typename G>
double weighted_ball_value(const G& g, double p, double T, const QuadratureSpec& spec) {
    const int n = std::max(8, spec.radial_nodes / 16);
    SphereRule sph = SphereRule::product_gauss(std::max(8, spec.sphere_order));
    Rule1D rad;
    append_rule(rad, absorbed_panel(0.0, std::min(1.0, 2.0 * T), std::max(1.0 - p, -0.9), true, n));
    if (2.0 * T > 1.0) append_log_panels(rad, 1.0, 2.0 * T, n);
    return apply_rule(rad, [&](double r) {
        return r * sph.integrate([&](Point3 om) { return g(Point3{r * om.x1, r * om.x2, r * om.x3}); });
    });
}

}  // namespace detail

/// SP1 value: int_{|z|<=2T} |f(z+w) - f(z)| / |z| dz.
inline double modulus_L1_first(const KernelSpec& kernel, double T, Point3 w,
                               const QuadratureSpec& spec = {}) {
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double p = kernel.origin_singularity_exponent();
    if (kernel.isotropic()) {
        auto prof = [&](double r) { return kernel.radial_profile(r); };
        return detail::sp1_radial_value(prof, p, wn, T, spec);
    }
    auto g = [&](Point3 z) {
        const double a = kernel.eval_f(z + w);
        const double b = kernel.eval_f(z);
        if (!std::isfinite(a) || !std::isfinite(b)) return 0.0;  // measure-zero set
        return std::abs(a - b);
    };
    return detail::weighted_ball_value(g, p + 1.0, T, spec);
}

/// SP2 value: int_{|z|<=2T} |f(z+w) + f(z-w) - 2 f(z)| / |z| dz.
inline double modulus_L1_second(const KernelSpec& kernel, double T, Point3 w,
                                const QuadratureSpec& spec = {}) {
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const double p = kernel.origin_singularity_exponent();
    if (kernel.isotropic()) {
        auto prof = [&](double r) { return kernel.radial_profile(r); };
        return detail::sp2_radial_value(prof, p, wn, T, spec);
    }
    auto g = [&](Point3 z) {
        const double a = kernel.eval_f(z + w);
        const double b = kernel.eval_f(z - w);
        const double c = kernel.eval_f(z);
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) return 0.0;
        return std::abs(a + b - 2.0 * c);
    };
    return detail::weighted_ball_value(g, p + 1.0, T, spec);
}

// ---------------------------------------------------------------------------
// Time conditions TC1 / TC2 over [0,T] x S^2 x S^2
// ---------------------------------------------------------------------------

/// TC1: int_0^T int int |f((s+h)(xi+eta)) - f(s xi + (s+h) eta)| s dsig dsig ds.
inline double time_condition_1(const KernelSpec& kernel, double T, double h,
                               const QuadratureSpec& spec = {}) {
    if (h < 0.0) throw std::invalid_argument("time_condition_1: h must be >= 0");
    if (h == 0.0) return 0.0;
    const double p = kernel.origin_singularity_exponent();
    SphereProductHint hint;
    hint.singularity_exponent = p;
    hint.feature_scale = h;
    hint.kink_u = [h](double s) { return -(2.0 * s + h) / (2.0 * (s + h)); };
    if (kernel.isotropic()) {
        // |(s+h)(xi+eta)| = (s+h) sqrt(2(1+u));
        // |s xi + (s+h) eta|^2 = h^2 + 2 s (s+h) (1+u)  (exact in 1+u)
        auto g = [&](double s, double /*u*/, double v) {
            const double a = (s + h) * std::sqrt(2.0 * v);
            const double b = std::sqrt(h * h + 2.0 * s * (s + h) * v);
            return std::abs(kernel.radial_profile(std::max(a, 1e-150)) -
                            kernel.radial_profile(std::max(b, 1e-150)));
        };
        return integrate_sphere_product_reduced(g, T, 1, spec, hint).value;
    }
    auto g = [&](double s, Point3 xi, Point3 eta) {
        const Point3 sum = xi + eta;
        const double a = kernel.eval_f((s + h) * sum);
        const double b = kernel.eval_f(s * sum + h * eta);
        if (!std::isfinite(a) || !std::isfinite(b)) return 0.0;
        return std::abs(a - b);
    };
    return integrate_sphere_product(g, T, 1, spec, hint).value;
}

/// TC2: the rectangular second difference with s^2 weight.
inline double time_condition_2(const KernelSpec& kernel, double T, double h,
                               const QuadratureSpec& spec = {}) {
    if (h < 0.0) throw std::invalid_argument("time_condition_2: h must be >= 0");
    if (h == 0.0) return 0.0;
    const double p = kernel.origin_singularity_exponent();
    SphereProductHint hint;
    hint.singularity_exponent = p;
    hint.feature_scale = h;
    hint.kink_u = [h](double s) { return -(2.0 * s + h) / (2.0 * (s + h)); };
    if (kernel.isotropic()) {
        auto g = [&](double s, double /*u*/, double v) {
            const double c = std::sqrt(2.0 * v);
            const double a = (s + h) * c;
            const double d = s * c;
            const double b = std::sqrt(h * h + 2.0 * s * (s + h) * v);
            return std::abs(kernel.radial_profile(std::max(a, 1e-150)) +
                            kernel.radial_profile(std::max(d, 1e-150)) -
                            2.0 * kernel.radial_profile(std::max(b, 1e-150)));
        };
        return integrate_sphere_product_reduced(g, T, 2, spec, hint).value;
    }
    auto g = [&](double s, Point3 xi, Point3 eta) {
        const Point3 sum = xi + eta;
        const double a = kernel.eval_f((s + h) * sum);
        const double b1 = kernel.eval_f(s * sum + h * eta);
        const double b2 = kernel.eval_f(s * sum + h * xi);
        const double c = kernel.eval_f(s * sum);
        if (!std::isfinite(a) || !std::isfinite(b1) || !std::isfinite(b2) || !std::isfinite(c)) return 0.0;
        return std::abs(a - b1 - b2 + c);
    };
    return integrate_sphere_product(g, T, 2, spec, hint).value;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace detail {

template <typename ValueFn>
ConditionReport sweep(ConditionId id, std::vector<double> grid, std::optional<double> sup, double slack,
                      ValueFn&& value_of) {
    ConditionReport r;
    r.id = id;
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    r.probe_grid = grid;
    r.predicted_sup = sup;
    r.slack = slack;
    try {
        for (double g : grid) r.integral_values.push_back(value_of(g));
        r.fit = fit_exponent(r.probe_grid, r.integral_values);
        r.verdict = judge(r);
    } catch (const QuadratureError& e) {
        r.note = e.what();
        r.verdict = Verdict::Inconclusive;
    } catch (const std::exception& e) {
        r.note = e.what();
        r.verdict = Verdict::Inconclusive;
    }
    return r;
}

}  // namespace detail

inline ConditionReport sweep_sp1(const KernelSpec& kernel, double T, Point3 direction,
                                 const std::vector<double>& magnitudes, const QuadratureSpec& spec = {},
                                 double slack = 0.15) {
    const Point3 dir = normalized(direction);
    return detail::sweep(ConditionId::SP1, magnitudes, kernel.predicted_exponents().gamma_sup, slack,
                         [&](double w) { return modulus_L1_first(kernel, T, w * dir, spec); });
}

inline ConditionReport sweep_sp2(const KernelSpec& kernel, double T, Point3 direction,
                                 const std::vector<double>& magnitudes, const QuadratureSpec& spec = {},
                                 double slack = 0.15) {
    const Point3 dir = normalized(direction);
    return detail::sweep(ConditionId::SP2, magnitudes, kernel.predicted_exponents().gamma_prime_sup, slack,
                         [&](double w) { return modulus_L1_second(kernel, T, w * dir, spec); });
}

inline ConditionReport sweep_tc1(const KernelSpec& kernel, double T, const std::vector<double>& lags,
                                 const QuadratureSpec& spec = {}, double slack = 0.15) {
    return detail::sweep(ConditionId::TC1, lags, kernel.predicted_exponents().rho1_sup, slack,
                         [&](double h) { return time_condition_1(kernel, T, h, spec); });
}

inline ConditionReport sweep_tc2(const KernelSpec& kernel, double T, const std::vector<double>& lags,
                                 const QuadratureSpec& spec = {}, double slack = 0.15) {
    return detail::sweep(ConditionId::TC2, lags, kernel.predicted_exponents().rho2_sup, slack,
                         [&](double h) { return time_condition_2(kernel, T, h, spec); });
}

// ---------------------------------------------------------------------------
// Predicted Hoelder exponents
// ---------------------------------------------------------------------------

/// Suprema of the provable Hoelder orders, by route. `increment` is the
/// modulus-of-continuity route (needs both L1 moduli), `fourier` the
/// spectral route; `time` combines the time conditions with the best space
/// order. Family entries are the sharper per-family statements.
struct HolderTable {
    std::optional<double> kappa1_increment;
    std::optional<double> kappa1_fourier;
    std::optional<double> kappa2_time;
    std::optional<double> family_space_sup;
    std::optional<double> family_joint_sup;
    std::optional<std::array<double, 4>> per_direction;  // kappa_1..3, kappa_0 (product kernel)
};

inline HolderTable predicted_holder(const KernelSpec& kernel, double gamma1, double gamma2) {
    if (!(gamma1 > 0.0 && gamma1 <= 1.0 && gamma2 > 0.0 && gamma2 <= 1.0))
        throw std::invalid_argument("predicted_holder: initial-condition orders must lie in (0,1]");
    const PredictedExponents pe = kernel.predicted_exponents();
    HolderTable t;
    const double g12 = std::min(gamma1, gamma2);
    if (pe.gamma_sup && pe.gamma_prime_sup)
        t.kappa1_increment = std::min(g12, std::min(*pe.gamma_sup, *pe.gamma_prime_sup / 2.0));
    if (pe.gamma_sup) t.kappa1_fourier = std::min(g12, *pe.gamma_sup);

    switch (kernel.family()) {
        case KernelFamily::Riesz: {
            const double b = kernel.beta();
            t.family_space_sup = std::min(g12, (2.0 - b) / 2.0);
            t.family_joint_sup = t.family_space_sup;
            break;
        }
        case KernelFamily::Bessel: {
            const double a = kernel.alpha();
            t.family_space_sup = std::min(g12, std::min(a - 1.0, 1.0));
            t.family_joint_sup = std::min(g12, std::min((a - 1.0) / 2.0, 1.0));
            break;
        }
        case KernelFamily::SmoothedRiesz: {
            t.family_space_sup = t.kappa1_fourier;
            break;
        }
        case KernelFamily::FractionalProduct: {
            if (pe.per_direction_space) {
                std::array<double, 4> per{};
                double k0 = 1.0;
                for (int i = 0; i < 3; ++i) {
                    per[i] = std::min(g12, (*pe.per_direction_space)[i]);
                    k0 = std::min(k0, per[i]);
                }
                per[3] = k0;
                t.per_direction = per;
                t.family_space_sup = k0;
                t.family_joint_sup = k0;
            }
            break;
        }
    }
    // time route: kappa2 = min(gamma1, gamma2, kappa1, (nu+1)/2, (rho1+kappa1)/2, rho2/2)
    std::optional<double> kappa1 = t.family_space_sup;
    if (!kappa1) kappa1 = t.kappa1_increment ? t.kappa1_increment : t.kappa1_fourier;
    if (kappa1 && pe.nu_sup && pe.rho1_sup && pe.rho2_sup) {
        t.kappa2_time = std::min({g12, *kappa1, (*pe.nu_sup + 1.0) / 2.0, (*pe.rho1_sup + *kappa1) / 2.0,
                                  *pe.rho2_sup / 2.0});
    }
    return t;
}

}  // namespace wavecov
