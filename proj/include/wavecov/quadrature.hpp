#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavecov/gauss.hpp"
#include "wavecov/geometry.hpp"

namespace wavecov {

/// Deterministic node counts and cutoffs for the integral engines.
/// Doubling `radial_nodes` and `sphere_order` must change any certified
/// result by less than `tolerance` (relative); that check is the
/// convergence certificate attached to every result.
struct QuadratureSpec {
    int radial_nodes = 256;
    int sphere_order = 16;       // product-Gauss order n; the rule has 2n^2 nodes
    double radial_cutoff = 1e3;  // spectral cutoff (may be raised per-integral)
    double split_radius = 1.0;   // separates singular and tail regions
    double tolerance = 1e-4;     // relative self-convergence target
    double tail_exponent_hint = 0.0;

    QuadratureSpec refined() const {
        QuadratureSpec s = *this;
        s.radial_nodes *= 2;
        s.sphere_order *= 2;
        return s;
    }
};

struct Certificate {
    double value = 0.0;         // refined result (the certified one)
    double coarse_value = 0.0;  // result at base node counts
    double delta = 0.0;         // |value - coarse_value|
    double tail_bound = 0.0;    // analytic bound on the dropped tail
    double cutoff_used = 0.0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double coarse, double refined)
        : std::runtime_error(what), coarse_value(coarse), refined_value(refined) {}
    double coarse_value;
    double refined_value;
};

/// Runs `eval` at base and doubled resolution and assembles the certificate.
/// `eval(spec)` must be deterministic in the spec.
template <typename Eval>
Certificate certify(const QuadratureSpec& spec, Eval&& eval, bool throw_on_failure = true) {
    Certificate c;
    c.coarse_value = eval(spec);
    c.value = eval(spec.refined());
    c.delta = std::abs(c.value - c.coarse_value);
    c.converged = c.delta <= spec.tolerance * (std::abs(c.value) + 1e-14);
    if (!c.converged && throw_on_failure) {
        std::ostringstream os;
        os << "quadrature did not converge: coarse=" << c.coarse_value << " refined=" << c.value
           << " delta=" << c.delta << " (tolerance " << spec.tolerance << ")";
        throw QuadratureError(os.str(), c.coarse_value, c.value);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Sphere rules
// ---------------------------------------------------------------------------

/// Quadrature rule on S^2: Gauss-Legendre in cos(theta) x uniform phi.
/// Exact for spherical polynomials up to degree ~order; weights sum to 4*pi
/// to machine precision. The half-step phi offset keeps every node off the
/// coordinate planes when `order` is even.
struct SphereRule {
    int order = 0;  // number of nodes
    std::vector<Point3> nodes;
    std::vector<double> weights;

    static SphereRule product_gauss(int n, double phi_offset = 0.5) {
        if (n < 2) throw std::invalid_argument("SphereRule: order must be >= 2");
        SphereRule r;
        const Rule1D& gl = gauss_legendre(n);
        const int m = 2 * n;
        const double wphi = 2.0 * pi / m;
        r.nodes.reserve(static_cast<std::size_t>(n) * m);
        r.weights.reserve(static_cast<std::size_t>(n) * m);
        for (int i = 0; i < n; ++i) {
            const double ct = gl.x[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int j = 0; j < m; ++j) {
                const double phi = (j + phi_offset) * wphi;
                r.nodes.push_back({st * std::cos(phi), st * std::sin(phi), ct});
                r.weights.push_back(gl.w[i] * wphi);
            }
        }
        r.order = static_cast<int>(r.nodes.size());
        return r;
    }

    template <typename F>
    double integrate(F&& f) const {
        std::vector<double> terms(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
        return pairwise_sum(terms);
    }
};

/// Rule on the open octant of S^2 for weights prod_i |w_i|^{a_i} with
/// a_i > -1: returns nodes and weights such that
///   sum_k W_k G(node_k)  ~=  int_{octant} prod |w_i|^{a_i} G(w) sigma(dw)
/// for smooth G. The endpoint powers (including the great-circle
/// singularities of the weight) are absorbed by the node maps, so this
/// converges fast even when a_i < 0.
struct WeightedOctantRule {
    std::vector<Point3> nodes;
    std::vector<double> weights;

    static WeightedOctantRule build(const std::array<double, 3>& a, int n) {
        for (double e : a)
            if (e <= -1.0) throw std::invalid_argument("octant rule: exponents must be > -1");
        // Each half-axis panel tracks the DISTANCE to its singular endpoint so
        // sin/cos of near-endpoint nodes keep full relative precision there.
        struct Axis {
            std::vector<double> sin_v, cos_v, w;
        };
        auto build_axis = [n](double e_at_0, double e_at_half_pi) {
            Axis ax;
            const Rule1D p0 = absorbed_panel(0.0, pi / 4, e_at_0, true, n);
            for (std::size_t i = 0; i < p0.size(); ++i) {
                const double s = p0.x[i];  // distance from 0
                ax.sin_v.push_back(std::sin(s));
                ax.cos_v.push_back(std::cos(s));
                ax.w.push_back(p0.w[i]);
            }
            const Rule1D p1 = absorbed_panel(0.0, pi / 4, e_at_half_pi, true, n);
            for (std::size_t i = 0; i < p1.size(); ++i) {
                const double s = p1.x[i];  // distance from pi/2
                ax.sin_v.push_back(std::cos(s));
                ax.cos_v.push_back(std::sin(s));
                ax.w.push_back(p1.w[i]);
            }
            return ax;
        };
        const Axis phi = build_axis(a[1], a[0]);
        const Axis theta = build_axis(a[0] + a[1] + 1.0, a[2]);

        WeightedOctantRule r;
        r.nodes.reserve(theta.w.size() * phi.w.size());
        r.weights.reserve(theta.w.size() * phi.w.size());
        for (std::size_t i = 0; i < theta.w.size(); ++i) {
            const double st = theta.sin_v[i], ct = theta.cos_v[i];
            const double wth = theta.w[i] * std::pow(st, a[0] + a[1] + 1.0) * std::pow(ct, a[2]);
            for (std::size_t j = 0; j < phi.w.size(); ++j) {
                const double cp = phi.cos_v[j], sp = phi.sin_v[j];
                const double wph = phi.w[j] * std::pow(cp, a[0]) * std::pow(sp, a[1]);
                r.nodes.push_back({st * cp, st * sp, ct});
                r.weights.push_back(wth * wph);
            }
        }
        return r;
    }

    /// Integral of prod |w_i|^{a_i} G over the FULL sphere for G even in
    /// each coordinate.
    template <typename F>
    double integrate_even(F&& f) const {
        std::vector<double> terms(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = weights[i] * f(nodes[i]);
        return 8.0 * pairwise_sum(terms);
    }

    double total_weight() const {
        std::vector<double> w = weights;
        return 8.0 * pairwise_sum(w);
    }
};

// ---------------------------------------------------------------------------
// Shell integrals:  int_{r_lo <= |x| <= r_hi} g(x) dx
// ---------------------------------------------------------------------------

/// Optional assertion that g(x) = prod_i |x_i/|x||^{a_i} * (radially clean part).
/// The angular factor is handled by a weighted octant rule; g must then be
/// even in each coordinate.
struct AngularStructure {
    std::array<double, 3> exponents{0.0, 0.0, 0.0};
};

namespace detail {

/// Head panel for a radial integrand ~ r^{2-p} at 0: the power map when a
/// genuine singularity is present, plain Gauss-Legendre otherwise (the map
/// would introduce fractional powers into a smooth integrand).
inline Rule1D head_panel(double hi, double singularity_exponent, int n) {
    const double e = 2.0 - singularity_exponent;
    if (e <= -1.0) throw std::invalid_argument("radial integral: non-integrable singularity");
    if (singularity_exponent <= 1e-14) return panel(0.0, hi, n);
    return absorbed_panel(0.0, hi, e, true, n);
}

inline Rule1D shell_radial_rule(double r_lo, double r_hi, double singularity_exponent,
                                const QuadratureSpec& spec) {
    // Radial integrand carries r^2 from the volume element, so the net power
    // at r=0 is 2 - singularity_exponent (> -1 required by (H1)-type bounds).
    Rule1D r;
    const int n = std::max(8, spec.radial_nodes / 8);
    if (r_lo <= 0.0) {
        const double head = std::min(r_hi, spec.split_radius);
        append_rule(r, head_panel(head, singularity_exponent, n));
        if (head < r_hi) append_log_panels(r, head, r_hi, n);
    } else {
        if (r_hi / r_lo > 4.0)
            append_log_panels(r, r_lo, r_hi, n);
        else
            append_rule(r, panel(r_lo, r_hi, n));
    }
    return r;
}

}  // namespace detail

template <typename F>
Certificate integrate_shell_weighted(F&& g, double r_lo, double r_hi, double singularity_exponent,
                                     const QuadratureSpec& spec,
                                     std::optional<AngularStructure> angular = std::nullopt,
                                     bool throw_on_failure = true) {
    if (!(r_hi > r_lo) || r_lo < 0.0) throw std::invalid_argument("integrate_shell_weighted: bad shell");
    auto eval = [&](const QuadratureSpec& s) -> double {
        Rule1D rad = detail::shell_radial_rule(r_lo, r_hi, singularity_exponent, s);
        if (angular) {
            const auto& a = angular->exponents;
            WeightedOctantRule oct = WeightedOctantRule::build(a, std::max(6, s.sphere_order));
            return apply_rule(rad, [&](double r) {
                const double v = oct.integrate_even([&](Point3 w) {
                    const double denom = std::pow(std::abs(w.x1), a[0]) * std::pow(std::abs(w.x2), a[1]) *
                                         std::pow(std::abs(w.x3), a[2]);
                    return g(Point3{r * w.x1, r * w.x2, r * w.x3}) / denom;
                });
                return r * r * v;
            });
        }
        SphereRule sph = SphereRule::product_gauss(std::max(6, s.sphere_order));
        return apply_rule(rad, [&](double r) {
            return r * r * sph.integrate([&](Point3 w) { return g(Point3{r * w.x1, r * w.x2, r * w.x3}); });
        });
    };
    return certify(spec, eval, throw_on_failure);
}

/// Purely radial variant: g given as a function of r = |x|.
template <typename F>
Certificate integrate_shell_radial(F&& g_of_r, double r_lo, double r_hi, double singularity_exponent,
                                   const QuadratureSpec& spec, bool throw_on_failure = true) {
    if (!(r_hi > r_lo) || r_lo < 0.0) throw std::invalid_argument("integrate_shell_radial: bad shell");
    auto eval = [&](const QuadratureSpec& s) -> double {
        Rule1D rad = detail::shell_radial_rule(r_lo, r_hi, singularity_exponent, s);
        return four_pi * apply_rule(rad, [&](double r) { return r * r * g_of_r(r); });
    };
    return certify(spec, eval, throw_on_failure);
}

// ---------------------------------------------------------------------------
// Spectral integrals:  int_{R^3} g(xi) density(xi) dxi
// ---------------------------------------------------------------------------

/// What the spectral engine needs to know about a density. Kernel modules
/// provide views of their spectral densities in this form.
struct DensityView {
    std::function<double(double)> radial;      // density as function of r (isotropic case)
    std::function<double(Point3)> pointwise;   // general evaluator
    double singularity_exponent = 0.0;         // density ~ r^{-p} at 0 (radial part)
    double tail_exponent = 0.0;                // density ~ tail_coeff * r^{-q} near cutoff
    double tail_coeff = 0.0;
    bool axis_singular = false;
    std::array<double, 3> axis_exponents{0.0, 0.0, 0.0};  // per-coordinate |xi_i|^{a_i}
    double axis_prefactor = 1.0;                           // density = pref * prod |xi_i|^{a_i}
};

namespace detail {

/// Geometric panels whose width is additionally capped so that Gauss-Legendre
/// resolves integrand oscillations of angular frequency `max_freq`.
inline void append_capped_panels(Rule1D& out, double lo, double hi, int n, double max_freq) {
    const double cap = (max_freq > 0.0) ? 1.5 * n / max_freq : std::numeric_limits<double>::infinity();
    double a = lo;
    while (a < hi * (1.0 - 1e-15)) {
        const double b = std::min({a * 2.0, a + cap, hi});
        append_rule(out, panel(a, b, n));
        a = b;
    }
}

inline Rule1D spectral_radial_rule(double cutoff, double p, const QuadratureSpec& spec,
                                   double max_freq = 0.0) {
    Rule1D r;
    const int n_in = std::max(12, spec.radial_nodes / 8);
    const int n_log = std::max(8, spec.radial_nodes / 16);
    append_rule(r, head_panel(spec.split_radius, p, n_in));
    append_capped_panels(r, spec.split_radius, cutoff, n_log, max_freq);
    return r;
}

}  // namespace detail

/// Generic spectral integral. `g` must be bounded near 0 after multiplying
/// by the density (all moment integrands here are). The tail beyond the
/// cutoff is not added to the value; an envelope bound goes into the
/// certificate, and exceeding the tolerance raises an error suggesting a
/// larger cutoff.
template <typename F>
Certificate integrate_spectral(F&& g, const DensityView& density, const QuadratureSpec& spec,
                               double max_freq = 0.0, bool throw_on_failure = true) {
    const double cutoff = spec.radial_cutoff;
    auto eval = [&](const QuadratureSpec& s) -> double {
        if (density.axis_singular) {
            // radial rule x weighted octant rule; requires g even per coordinate
            Rule1D rad;
            {
                const double p = -(density.axis_exponents[0] + density.axis_exponents[1] +
                                   density.axis_exponents[2]);
                rad = detail::spectral_radial_rule(cutoff, p, s, max_freq);
            }
            WeightedOctantRule oct = WeightedOctantRule::build(density.axis_exponents,
                                                               std::max(6, s.sphere_order));
            const double sum_a = density.axis_exponents[0] + density.axis_exponents[1] +
                                 density.axis_exponents[2];
            return apply_rule(rad, [&](double r) {
                const double v = oct.integrate_even([&](Point3 w) {
                    return g(Point3{r * w.x1, r * w.x2, r * w.x3});
                });
                return density.axis_prefactor * std::pow(r, sum_a) * r * r * v;
            });
        }
        Rule1D rad = detail::spectral_radial_rule(cutoff, density.singularity_exponent, s, max_freq);
        SphereRule sph = SphereRule::product_gauss(std::max(6, s.sphere_order));
        return apply_rule(rad, [&](double r) {
            const double rho = density.radial(r);
            return rho * r * r *
                   sph.integrate([&](Point3 w) { return g(Point3{r * w.x1, r * w.x2, r * w.x3}); });
        });
    };
    Certificate c = certify(spec, eval, throw_on_failure);
    c.cutoff_used = cutoff;
    // Envelope bound: |g * density| <= E * (r/cutoff)^{-q_tot} beyond the cutoff.
    const double q_tot = density.tail_exponent + spec.tail_exponent_hint;
    if (q_tot <= 3.0) {
        if (throw_on_failure)
            throw QuadratureError("spectral tail does not decay: provide tail_exponent_hint", c.coarse_value,
                                  c.value);
        c.converged = false;
        return c;
    }
    double boundary = 0.0;
    {
        SphereRule probe = SphereRule::product_gauss(6);
        for (std::size_t i = 0; i < probe.nodes.size(); ++i) {
            const Point3 x{cutoff * probe.nodes[i].x1, cutoff * probe.nodes[i].x2,
                           cutoff * probe.nodes[i].x3};
            const double rho = density.axis_singular ? density.pointwise(x) : density.radial(cutoff);
            boundary = std::max(boundary, std::abs(g(x) * rho));
        }
    }
    c.tail_bound = four_pi * boundary * cutoff * cutoff * cutoff / (q_tot - 3.0);
    if (c.tail_bound > spec.tolerance * (std::abs(c.value) + 1e-14)) {
        if (throw_on_failure) {
            std::ostringstream os;
            os << "spectral tail bound " << c.tail_bound << " exceeds tolerance; increase radial_cutoff (currently "
               << cutoff << ")";
            throw QuadratureError(os.str(), c.coarse_value, c.value);
        }
        c.converged = false;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Half-line integrals:  int_0^inf g(w) dw  with power behavior at 0 and
// (at least) exponential decay at infinity.
// ---------------------------------------------------------------------------

template <typename F>
Certificate integrate_halfline(F&& g, const QuadratureSpec& spec, double power_at_zero = 0.0,
                               bool throw_on_failure = true) {
    if (power_at_zero <= -1.0) throw std::invalid_argument("integrate_halfline: non-integrable at 0");
    // After w = e^u the integrand is g(e^u) e^u; truncation keeps the dropped
    // envelope below 1e-12 relative on both sides.
    const double u_lo = -42.0 / (power_at_zero + 1.0);
    const double u_hi = std::log(50.0 + 12.0 * std::abs(power_at_zero));
    auto eval = [&](const QuadratureSpec& s) -> double {
        const int n = std::max(8, s.radial_nodes / 16);
        Rule1D rule;
        double a = u_lo;
        const double step = 2.0;
        while (a < u_hi) {
            const double b = std::min(a + step, u_hi);
            append_rule(rule, panel(a, b, n));
            a = b;
        }
        return apply_rule(rule, [&](double u) {
            const double w = std::exp(u);
            return g(w) * w;
        });
    };
    return certify(spec, eval, throw_on_failure);
}

// ---------------------------------------------------------------------------
// [0,T] x S^2 x S^2 product integrals
// ---------------------------------------------------------------------------

/// Grading hints for integrands built from a kernel with an |x|^{-p}
/// singularity evaluated at s(xi+eta)-type arguments: the integrable blowup
/// sits where xi ~ -eta, at angular scale (feature/s)^2.
struct SphereProductHint {
    double singularity_exponent = 0.0;  // p of the underlying kernel
    double feature_scale = 0.0;         // h; 0 means no sharp peak
    std::function<double(double)> kink_u;  // optional: u where the integrand has a kink, per s
};

namespace detail {

/// Inner u-integral of the reduced product rule. The integrand receives
/// both u and (1+u); the latter is carried exactly through the graded panels
/// near u = -1, where computing 1+u from a rounded u would lose everything.
template <typename G>
double sphere_product_inner_u(G&& g_suv, double s, const SphereProductHint& hint,
                              const QuadratureSpec& spec) {
    const int n = std::max(12, spec.radial_nodes / 8);
    const double p = hint.singularity_exponent;
    const double h = hint.feature_scale;
    double ustar = 1.0;
    if (hint.kink_u) ustar = std::min(1.0, std::max(-1.0, hint.kink_u(s)));

    std::vector<double> terms;
    auto add_plain = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        Rule1D r = panel(lo, hi, n);
        for (std::size_t i = 0; i < r.size(); ++i)
            terms.push_back(r.w[i] * g_suv(s, r.x[i], 1.0 + r.x[i]));
    };
    if (p > 0.0) {
        double vpeak;
        if (h > 0.0) {
            const double sh = s + h;
            vpeak = 4.0 * std::max(h * h / (sh * sh), h * h / (2.0 * s * sh + 1e-300));
        } else {
            vpeak = 1e-10;
        }
        vpeak = std::min(vpeak, 0.5 * (1.0 + ustar));
        vpeak = std::max(vpeak, 1e-280);
        {
            // graded head panel in v = 1+u, distances kept exact
            Rule1D head = absorbed_panel(0.0, vpeak, -0.5 * p, true, n);
            for (std::size_t i = 0; i < head.size(); ++i) {
                const double v = head.x[i];
                terms.push_back(head.w[i] * g_suv(s, v - 1.0, v));
            }
        }
        double lo = -1.0 + vpeak;
        while (lo < ustar - 1e-15) {
            const double hi = std::min(-1.0 + 4.0 * (1.0 + lo), ustar);
            add_plain(lo, hi);
            lo = hi;
        }
        // keep growing geometrically past the kink: the integrand still
        // varies on the 1+u scale there
        lo = ustar;
        while (lo < 1.0 - 1e-15) {
            const double hi = std::min(-1.0 + 4.0 * (1.0 + lo), 1.0);
            add_plain(lo, hi);
            lo = hi;
        }
    } else {
        if (ustar > -1.0 + 1e-12 && ustar < 1.0 - 1e-12) {
            add_plain(-1.0, ustar);
            add_plain(ustar, 1.0);
        } else {
            add_plain(-1.0, 1.0);
        }
    }
    return pairwise_sum(terms);
}

}  // namespace detail

/// Axisymmetric reduction: g depends on (s, u = xi.eta) only; the callback
/// receives (s, u, 1+u) with the last argument exact near u = -1.
/// Computes int_0^T int_{S^2 x S^2} g s^{s_power} dsigma dsigma ds
///        = 8 pi^2 int_0^T s^{s_power} int_{-1}^{1} g(s,u) du ds.
template <typename G>
Certificate integrate_sphere_product_reduced(G&& g_su, double T, int s_power,
                                             const QuadratureSpec& spec,
                                             SphereProductHint hint = {},
                                             bool throw_on_failure = true) {
    if (!(T > 0.0) || (s_power != 1 && s_power != 2))
        throw std::invalid_argument("integrate_sphere_product: T > 0 and s_power in {1,2} required");
    auto eval = [&](const QuadratureSpec& s_spec) -> double {
        const int n = std::max(12, s_spec.radial_nodes / 8);
        const double p = hint.singularity_exponent;
        const double h = hint.feature_scale;
        Rule1D srule;
        const double head = std::min(h > 0.0 ? h : T, T);
        double e0 = s_power - p;
        if (e0 <= -1.0) e0 = -0.9;  // weight s^{s_power} tames the kernel blowup
        append_rule(srule, absorbed_panel(0.0, head, e0, true, n));
        if (head < T) append_log_panels(srule, head, T, n);
        return 8.0 * pi * pi *
               apply_rule(srule, [&](double s) {
                   const double sw = (s_power == 1) ? s : s * s;
                   return sw * detail::sphere_product_inner_u(g_su, s, hint, s_spec);
               });
    };
    return certify(spec, eval, throw_on_failure);
}

/// Full product rule for general g(s, xi, eta). The eta rule is built in a
/// frame whose pole is -xi with the polar angle graded toward the pole, so
/// kernels singular at xi ~ -eta integrate cleanly.
template <typename G>
Certificate integrate_sphere_product(G&& g, double T, int s_power, const QuadratureSpec& spec,
                                     SphereProductHint hint = {}, bool throw_on_failure = true) {
    if (!(T > 0.0) || (s_power != 1 && s_power != 2))
        throw std::invalid_argument("integrate_sphere_product: T > 0 and s_power in {1,2} required");
    auto eval = [&](const QuadratureSpec& s_spec) -> double {
        const int n_ang = std::max(6, s_spec.sphere_order / 2);
        SphereRule outer = SphereRule::product_gauss(std::max(6, s_spec.sphere_order));
        // polar rule around the pole, graded: measure sin(th) ~ th, kernel ~ th^{-p}
        Rule1D th_rule;
        {
            const double e = 1.0 - hint.singularity_exponent;
            append_rule(th_rule, absorbed_panel(0.0, pi / 2, e > -1.0 ? e : -0.9, true, n_ang));
            append_rule(th_rule, panel(pi / 2, pi, n_ang));
        }
        const int m_phi = 2 * n_ang;
        const double wphi = 2.0 * pi / m_phi;

        const int n_s = std::max(8, s_spec.radial_nodes / 16);
        Rule1D srule;
        {
            double e0 = s_power - hint.singularity_exponent;
            if (e0 <= -1.0) e0 = -0.9;
            const double head = std::min(hint.feature_scale > 0.0 ? hint.feature_scale : T, T);
            append_rule(srule, absorbed_panel(0.0, head, e0, true, n_s));
            if (head < T) append_log_panels(srule, head, T, n_s);
        }
        return apply_rule(srule, [&](double s) {
            const double sw = (s_power == 1) ? s : s * s;
            std::vector<double> outer_terms(outer.nodes.size());
            for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
                const Point3 xi = outer.nodes[i];
                // orthonormal frame with pole at -xi
                const Point3 pole = -xi;
                Point3 seed = std::abs(pole.x1) < 0.9 ? Point3{1, 0, 0} : Point3{0, 1, 0};
                Point3 e1 = normalized(seed - dot(seed, pole) * pole);
                Point3 e2{pole.x2 * e1.x3 - pole.x3 * e1.x2, pole.x3 * e1.x1 - pole.x1 * e1.x3,
                          pole.x1 * e1.x2 - pole.x2 * e1.x1};
                std::vector<double> inner(th_rule.size());
                for (std::size_t k = 0; k < th_rule.size(); ++k) {
                    const double th = th_rule.x[k];
                    const double st = std::sin(th), ct = std::cos(th);
                    double acc = 0.0;
                    for (int j = 0; j < m_phi; ++j) {
                        const double ph = (j + 0.37) * wphi;  // offset keeps eta != -xi exactly
                        const Point3 eta = ct * pole + (st * std::cos(ph)) * e1 + (st * std::sin(ph)) * e2;
                        acc += g(s, xi, eta);
                    }
                    inner[k] = th_rule.w[k] * st * acc * wphi;
                }
                outer_terms[i] = outer.weights[i] * pairwise_sum(inner);
            }
            return sw * pairwise_sum(outer_terms);
        });
    };
    return certify(spec, eval, throw_on_failure);
}

}  // namespace wavecov
