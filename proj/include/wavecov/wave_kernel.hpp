#pragma once

#include <cmath>
#include <stdexcept>

#include "wavecov/geometry.hpp"
#include "wavecov/kernels.hpp"
#include "wavecov/quadrature.hpp"
#include "wavecov/rng.hpp"

namespace wavecov {

/// Fourier transform of the 3-D wave propagator: sin(t r)/r, with the
/// removable singularity filled by a short series below t*r = 1e-4 to avoid
/// the cancellation in sin(tr)/r - t.
inline double wave_propagator_ft(double t, double xi_norm) {
    if (t < 0.0 || xi_norm < 0.0) throw std::invalid_argument("wave_propagator_ft: negative argument");
    const double theta = t * xi_norm;
    if (theta < 1e-4) return t * (1.0 - theta * theta / 6.0);
    return std::sin(theta) / xi_norm;
}

/// Uniform point on the sphere of given radius, via normalized Gaussian
/// triples (rejection-free).
inline Point3 sample_sphere(double radius, RngStream& rng) {
    if (!(radius > 0.0)) throw std::invalid_argument("sample_sphere: radius must be positive");
    for (;;) {
        const Point3 g{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        const double n = g.norm();
        if (n > 1e-12) return (radius / n) * g;
    }
}

/// Probability density of |X+Y| as a measure on R^3, for X, Y independent
/// uniform on spheres of radii s >= t > 0: 1/(8 pi t s |z|) on s-t <= |z| <= s+t.
/// This is the normalized (total mass one) form; the measure-valued
/// convolution of the two propagators is the same density times s*t.
inline double sphere_convolution_density(double s, double t, double r) {
    if (!(t > 0.0) || s < t) throw std::invalid_argument("sphere_convolution_density: need s >= t > 0");
    if (r < 0.0) throw std::invalid_argument("sphere_convolution_density: r must be >= 0");
    if (r < s - t || r > s + t) return 0.0;
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (8.0 * pi * t * s * r);
}

/// Unnormalized form matching the measure (G(s)*G(t))(dx) = st * density.
inline double sphere_convolution_measure_density(double s, double t, double r) {
    const double d = sphere_convolution_density(s, t, r);
    return s * t * d;
}

/// Physical-side shell correlation  int int f(x-y) G(s,dx) G(t,dy)
///                                = int_{|s-t| <= |x| <= s+t} f(x)/(8 pi |x|) dx.
/// Arguments are ordered internally, so the functional is symmetric in (s,t).
inline Certificate shell_correlation_physical(const KernelSpec& kernel, double s, double t,
                                              const QuadratureSpec& spec = {}) {
    if (!(s > 0.0) || !(t > 0.0))
        throw std::invalid_argument("shell_correlation_physical: s, t must be positive");
    const double hi = s + t;
    const double lo = std::abs(s - t);
    if (kernel.isotropic()) {
        return integrate_shell_radial(
            [&](double r) { return kernel.radial_profile(r) / (8.0 * pi * r); }, lo, hi,
            kernel.origin_singularity_exponent() + 1.0, spec);
    }
    AngularStructure ang{kernel.f_axis_exponents()};
    return integrate_shell_weighted(
        [&](Point3 x) { return kernel.eval_f(x) / (8.0 * pi * x.norm()); }, lo, hi,
        kernel.origin_singularity_exponent() + 1.0, spec, ang);
}

}  // namespace wavecov
