#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavecov/wave_kernel.hpp"

using namespace wavecov;
using Catch::Approx;

TEST_CASE("wave propagator transform: values and the removable singularity", "[wave_kernel]") {
    CHECK(wave_propagator_ft(1.0, 0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(wave_propagator_ft(pi, 1.0)) < 1e-15);
    CHECK(wave_propagator_ft(1.0, pi / 2.0) == Approx(2.0 / pi).epsilon(1e-14));

    // continuity across the series/direct switch at t*r = 1e-4
    const double t = 1.0;
    const double r_lo = 1e-4 * (1.0 - 1e-9), r_hi = 1e-4 * (1.0 + 1e-9);
    CHECK(std::abs(wave_propagator_ft(t, r_lo) - wave_propagator_ft(t, r_hi)) < 1e-12);
    CHECK_THROWS_AS(wave_propagator_ft(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sphere sampling is uniform", "[wave_kernel]") {
    RngStream rng(31ULL);
    const double radius = 2.5;
    const std::size_t n = 100000;
    std::vector<double> z(n);
    double sx = 0, sy = 0, sz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point3 p = sample_sphere(radius, rng);
        CHECK(std::abs(p.norm() - radius) < 1e-12);
        z[i] = p.x3;
        sx += p.x1;
        sy += p.x2;
        sz += p.x3;
    }
    // Archimedes: the z-coordinate is uniform on [-r, r]
    std::sort(z.begin(), z.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = (z[i] + radius) / (2.0 * radius);
        const double emp_hi = static_cast<double>(i + 1) / n;
        const double emp_lo = static_cast<double>(i) / n;
        ks = std::max({ks, std::abs(cdf - emp_hi), std::abs(cdf - emp_lo)});
    }
    CHECK(ks < 0.02);
    // CLT bound on the mean: 3 * r / sqrt(3 n) per coordinate
    const double bound = 3.0 * radius / std::sqrt(3.0 * n);
    CHECK(std::abs(sx / n) < bound);
    CHECK(std::abs(sy / n) < bound);
    CHECK(std::abs(sz / n) < bound);
}

TEST_CASE("sphere convolution density", "[wave_kernel]") {
    CHECK(sphere_convolution_density(1.0, 1.0, 1.0) == Approx(1.0 / (8.0 * pi)).epsilon(1e-14));
    CHECK(sphere_convolution_density(2.0, 1.0, 0.5) == 0.0);
    CHECK_THROWS_AS(sphere_convolution_density(1.0, 2.0, 1.0), std::invalid_argument);

    // total mass one (radial quadrature of 4 pi r^2 rho)
    const double s = 1.7, t = 0.6;
    QuadratureSpec spec;
    spec.tolerance = 1e-12;
    auto c = integrate_shell_radial([&](double r) { return sphere_convolution_density(s, t, r); },
                                    s - t, s + t, 0.0, spec);
    CHECK(c.value == Approx(1.0).margin(1e-10));

    // unnormalized = s * t * normalized, pointwise
    for (double r : {1.2, 1.8, 2.2}) {
        CHECK(sphere_convolution_measure_density(s, t, r) ==
              Approx(s * t * sphere_convolution_density(s, t, r)).epsilon(1e-15));
    }
}

TEST_CASE("empirical |X+Y| distribution matches the shell law", "[wave_kernel]") {
    // F(r) = (r^2 - (s-t)^2) / (4 s t) on [s-t, s+t]
    const double s = 1.5, t = 1.0;
    RngStream rng(7ULL);
    const std::size_t n = 100000;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = (sample_sphere(s, rng) + sample_sphere(t, rng)).norm();
    std::sort(r.begin(), r.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = (r[i] * r[i] - (s - t) * (s - t)) / (4.0 * s * t);
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i + 1) / n),
                       std::abs(cdf - static_cast<double>(i) / n)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("physical shell correlation: Riesz closed forms", "[wave_kernel]") {
    // (1/2) (2s)^{2-beta} / (2-beta) at s = t
    auto closed = [](double beta, double s, double t) {
        return 0.5 *
               (std::pow(s + t, 2.0 - beta) - std::pow(std::abs(s - t), 2.0 - beta)) /
               (2.0 - beta);
    };
    QuadratureSpec spec;
    for (double beta : {0.5, 1.0, 1.5}) {
        const KernelSpec k = KernelSpec::riesz(beta);
        auto c = shell_correlation_physical(k, 1.0, 1.0, spec);
        CHECK(c.value == Approx(closed(beta, 1.0, 1.0)).epsilon(1e-10));
        CHECK(c.converged);
    }
    CHECK(shell_correlation_physical(KernelSpec::riesz(1.0), 1.0, 1.0, spec).value ==
          Approx(1.0).epsilon(1e-10));
    CHECK(shell_correlation_physical(KernelSpec::riesz(0.5), 1.0, 1.0, spec).value ==
          Approx(0.5 * std::pow(2.0, 1.5) / 1.5).epsilon(1e-10));

    // symmetry under argument swap
    const KernelSpec k = KernelSpec::riesz(0.8);
    CHECK(shell_correlation_physical(k, 1.7, 0.4, spec).value ==
          Approx(shell_correlation_physical(k, 0.4, 1.7, spec).value).epsilon(1e-12));

    // shell collapses as t -> 0 (G(t) has total mass t)
    CHECK(shell_correlation_physical(k, 1.0, 1e-4, spec).value < 1e-3);
}

TEST_CASE("physical shell correlation: fractional closed form oracle", "[wave_kernel]") {
    // For f = c_H prod |x_i|^{2H_i-2} the shell integral separates:
    //   int_shell f/(8 pi |x|) dx = c_H A_H [ (s+t)^{2k} - (s-t)^{2k} ] / (16 pi k),
    // with A_H the Beta-closed angular integral and k = kappa_bar.
    const std::array<double, 3> H{0.8, 0.8, 0.8};
    const KernelSpec k = KernelSpec::fractional(H[0], H[1], H[2]);
    auto beta_fn = [](double x, double y) {
        return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
    };
    const std::array<double, 3> a{2 * H[0] - 2, 2 * H[1] - 2, 2 * H[2] - 2};
    const double A_H =
        2.0 * beta_fn((a[0] + 1) / 2, (a[1] + 1) / 2) * beta_fn((a[0] + a[1] + 2) / 2, (a[2] + 1) / 2);
    const double kb = k.kappa_bar();
    const double cH = constants::fractional_ch(H);
    for (auto [s, t] : {std::pair{1.0, 1.0}, std::pair{1.5, 0.5}}) {
        const double closed = cH * A_H *
                              (std::pow(s + t, 2.0 * kb) - std::pow(std::abs(s - t), 2.0 * kb)) /
                              (16.0 * pi * kb);
        QuadratureSpec spec;
        auto c = shell_correlation_physical(k, s, t, spec);
        CHECK(c.value == Approx(closed).epsilon(1e-6));
    }
}
