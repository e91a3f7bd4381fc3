#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wavecov/kernels.hpp"
#include "wavecov/moments.hpp"
#include "wavecov/wave_kernel.hpp"

using namespace wavecov;
using Catch::Approx;

TEST_CASE("parameter validation", "[kernels]") {
    CHECK_THROWS_AS(KernelSpec::riesz(0.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::riesz(2.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::bessel(1.0), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::fractional(0.5, 0.8, 0.8), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::fractional(0.8, 1.0, 0.8), std::invalid_argument);
    // H1+H2+H3 <= 2 constructs but carries the scaling warning
    const KernelSpec weak = KernelSpec::fractional(0.6, 0.6, 0.6);
    CHECK(weak.scaling_warning());
    CHECK_FALSE(KernelSpec::fractional(0.8, 0.8, 0.8).scaling_warning());
}

TEST_CASE("eval_f: pointwise examples", "[kernels]") {
    CHECK(eval_f(KernelSpec::riesz(1.0), Point3{2, 0, 0}) == Approx(0.5).epsilon(1e-15));
    CHECK(eval_f(KernelSpec::fractional(0.75, 0.75, 0.75), Point3{1, 1, 1}) ==
          Approx(0.052734375).epsilon(1e-14));
    CHECK(eval_f(KernelSpec::bessel(5.0), Point3{0, 0, 0}) == Approx(1.0).epsilon(1e-14));

    // singular sets produce +infinity
    CHECK(std::isinf(eval_f(KernelSpec::riesz(1.0), Point3{0, 0, 0})));
    CHECK(std::isinf(eval_f(KernelSpec::bessel(2.0), Point3{0, 0, 0})));
    CHECK(std::isinf(eval_f(KernelSpec::fractional(0.8, 0.8, 0.8), Point3{0.0, 1.0, 1.0})));
    CHECK(std::isfinite(eval_f(KernelSpec::smoothed_riesz(1.0), Point3{0, 0, 0})));
}

TEST_CASE("eval_f: symmetry and positivity", "[kernels]") {
    const std::vector<KernelSpec> kernels{KernelSpec::riesz(0.7), KernelSpec::bessel(2.3),
                                          KernelSpec::fractional(0.8, 0.7, 0.9),
                                          KernelSpec::smoothed_riesz(1.2)};
    const std::vector<Point3> pts{{0.3, -0.2, 0.9}, {1.5, 0.1, -0.4}, {-2.0, 2.0, 0.5}};
    for (const auto& k : kernels)
        for (const auto& x : pts) {
            const double v = eval_f(k, x);
            CHECK(v >= 0.0);
            CHECK(eval_f(k, -x) == Approx(v).epsilon(1e-14));
        }
}

TEST_CASE("Bessel profile: decreasing, decaying, and matching the subordination oracle", "[kernels]") {
    const double alpha = 2.0;
    const KernelSpec k = KernelSpec::bessel(alpha);
    // closed form for alpha = 2: f(r) = 2 sqrt(pi) e^{-r} / r
    for (double r : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        CHECK(k.radial_profile(r) == Approx(2.0 * std::sqrt(pi) * std::exp(-r) / r).epsilon(1e-10));
    }
    // general-order oracle via the modified Bessel function
    for (double a : {1.5, 2.7, 4.2}) {
        const KernelSpec kb = KernelSpec::bessel(a);
        const double nu = (a - 3.0) / 2.0;
        for (double r : {0.3, 1.0, 2.5}) {
            const double oracle = 2.0 * std::pow(r * r / 4.0, nu / 2.0) * std::cyl_bessel_k(std::abs(nu), r);
            CHECK(kb.radial_profile(r) == Approx(oracle).epsilon(1e-9));
        }
    }
    // radially non-increasing, vanishing at infinity
    double prev = k.radial_profile(0.05);
    for (double r = 0.1; r < 8.0; r += 0.1) {
        const double v = k.radial_profile(r);
        CHECK(v <= prev * (1.0 + 1e-12));
        prev = v;
    }
    CHECK(k.radial_profile(12.0) < 1e-4);

    // small-r growth: f ~ 2^{3-a} Gamma((3-a)/2) r^{a-3}
    const double lead = std::pow(2.0, 3.0 - alpha) * std::tgamma((3.0 - alpha) / 2.0);
    CHECK(k.radial_profile(1e-3) * std::pow(1e-3, 3.0 - alpha) == Approx(lead).epsilon(2e-3));
}

TEST_CASE("smoothed Riesz cache matches the direct integral and the origin value", "[kernels]") {
    const double beta = 1.0;
    const KernelSpec k = KernelSpec::smoothed_riesz(beta);
    CHECK(k.radial_profile(0.0) == Approx(2.0 * pi * std::tgamma((3.0 - beta) / 2.0)).epsilon(1e-9));
    for (double r : {0.05, 0.31, 1.17, 3.3, 9.9}) {
        CHECK(k.radial_profile(r) == Approx(detail::smoothed_riesz_direct(r, beta, 32)).epsilon(1e-7));
    }
    // far field approaches the plain Riesz profile scaled by the mollifier mass
    CHECK(k.radial_profile(20.0) == Approx(std::pow(pi, 1.5) / 20.0).epsilon(1e-3));
}

TEST_CASE("spectral density: shapes without constants", "[kernels]") {
    const KernelSpec k = KernelSpec::riesz(1.0, /*constants=*/false);
    CHECK(eval_spectral_density(k, Point3{2, 0, 0}) == Approx(0.25).epsilon(1e-14));
    const KernelSpec kf = KernelSpec::fractional(0.8, 0.8, 0.8, false);
    CHECK(eval_spectral_density(kf, Point3{1, 2, 1}) == Approx(std::pow(2.0, -0.6)).epsilon(1e-13));
    CHECK_THROWS_AS(eval_spectral_density(kf, Point3{0, 1, 1}), std::domain_error);
    CHECK_THROWS_AS(eval_spectral_density(k, Point3{0, 0, 0}), std::domain_error);
}

namespace {

// Independent 1-D oscillatory oracle: int_0^inf H(2H-1) x^{2H-2} cos(xi x) dx,
// integrated over half-periods with iterated averaging of the partial sums.
double fractional_line_transform(double hurst, double xi) {
    const double amp = hurst * (2.0 * hurst - 1.0);
    auto seg = [&](double a, double b) {
        Rule1D r = (a == 0.0) ? absorbed_panel(0.0, b, 2.0 * hurst - 2.0, true, 24) : panel(a, b, 24);
        return apply_rule(r, [&](double x) { return amp * std::pow(x, 2.0 * hurst - 2.0) * std::cos(xi * x); });
    };
    const int warm = 40, tail = 24;
    std::vector<double> partial;
    double acc = 0.0, prev = 0.0;
    for (int k = 0; k < warm + tail; ++k) {
        const double b = (k + 0.5) * pi / xi;
        acc += seg(prev, b);
        prev = b;
        if (k >= warm) partial.push_back(acc);
    }
    // repeated pairwise averaging accelerates the alternating tail
    std::vector<double> v = partial;
    for (int pass = 0; pass < 6; ++pass) {
        std::vector<double> next(v.size() - 1);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) next[i] = 0.5 * (v[i] + v[i + 1]);
        v = next;
    }
    return 2.0 * v[v.size() / 2];
}

}  // namespace

TEST_CASE("fractional 1-D spectral constant against the oscillatory oracle", "[kernels]") {
    const double H = 0.8;
    for (double xi : {1.0, 2.0, 4.0}) {
        const double oracle = fractional_line_transform(H, xi);
        const double predicted = constants::fractional_c1(H) * std::pow(xi, 1.0 - 2.0 * H);
        CHECK(oracle == Approx(predicted).epsilon(0.01));
    }
}

TEST_CASE("(H2) certification: finite, certified, and matching closed forms", "[kernels]") {
    // Riesz: 4 pi C_R int r^{beta-1}/(1+r^2) dr = 4 pi C_R pi/(2 sin(pi beta/2))
    for (double beta : {0.5, 1.0, 1.5}) {
        const KernelSpec k = KernelSpec::riesz(beta);
        const double cr = constants::riesz_c3(beta) / std::pow(2.0 * pi, 3.0);
        const double closed = four_pi * cr * pi / (2.0 * std::sin(pi * beta / 2.0));
        CHECK(k.spectral_density().h2_integral() == Approx(closed).epsilon(1e-5));
        CHECK(k.spectral_density().h2_certificate().converged);
    }
    // Bessel: 4 pi c_B B(3/2, (alpha-1)/2)/2
    for (double alpha : {1.5, 2.0, 3.0}) {
        const KernelSpec k = KernelSpec::bessel(alpha);
        auto beta_fn = [](double x, double y) {
            return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
        };
        const double closed =
            four_pi * constants::bessel_cb(alpha) * 0.5 * beta_fn(1.5, (alpha - 1.0) / 2.0);
        CHECK(k.spectral_density().h2_integral() == Approx(closed).epsilon(1e-4));
    }
    CHECK(std::isfinite(KernelSpec::fractional(0.8, 0.8, 0.8).spectral_density().h2_integral()));
    CHECK(std::isinf(KernelSpec::fractional(0.6, 0.6, 0.6).spectral_density().h2_integral()));
}

TEST_CASE("constant self-consistency through the dual shell computation", "[kernels]") {
    // This is the gate that pins every normalization constant.
    const std::vector<std::pair<double, double>> st{{1.0, 1.0}, {1.5, 1.0}, {2.0, 0.5}};
    QuadratureSpec spec;
    for (const KernelSpec& k :
         {KernelSpec::riesz(1.0), KernelSpec::bessel(2.0), KernelSpec::fractional(0.8, 0.8, 0.8)}) {
        for (auto [s, t] : st) {
            const double phys = shell_correlation_physical(k, s, t, spec).value;
            const double spectral = shell_correlation_spectral(k, s, t, spec).value;
            CHECK(spectral == Approx(phys).epsilon(1e-3));
        }
    }
    const KernelSpec sm = KernelSpec::smoothed_riesz(1.0);
    for (auto [s, t] : st) {
        const double phys = shell_correlation_physical(sm, s, t, spec).value;
        const double spectral = shell_correlation_spectral(sm, s, t, spec).value;
        CHECK(spectral == Approx(phys).epsilon(5e-3));
    }
}

TEST_CASE("predicted exponents: per-family tables", "[kernels]") {
    {
        const PredictedExponents p = predicted_exponents(KernelSpec::riesz(1.0));
        REQUIRE(p.nu_sup);
        REQUIRE(p.rho1_sup);
        REQUIRE(p.rho2_sup);
        REQUIRE(p.gamma_sup);
        CHECK(*p.nu_sup == 1.0);
        CHECK(*p.rho1_sup == 1.0);
        CHECK(*p.rho2_sup == 1.0);
        CHECK(*p.gamma_sup == 0.5);
        CHECK_FALSE(p.gamma_prime_sup);
        CHECK_FALSE(p.kappa_bar);
    }
    {
        const PredictedExponents p = predicted_exponents(KernelSpec::bessel(1.5));
        CHECK(*p.nu_sup == 0.5);
        CHECK(*p.gamma_sup == 0.5);
        CHECK(*p.rho1_sup == 0.5);
        CHECK(*p.gamma_prime_sup == 0.5);
        CHECK(*p.rho2_sup == 0.5);
    }
    {
        const PredictedExponents p = predicted_exponents(KernelSpec::fractional(0.8, 0.8, 0.8));
        REQUIRE(p.kappa_bar);
        CHECK(*p.kappa_bar == Approx(0.4).epsilon(1e-14));
        REQUIRE(p.per_direction_space);
        for (double v : *p.per_direction_space) CHECK(v == Approx(0.3).epsilon(1e-12));
        CHECK(*p.nu_sup == Approx(0.8).epsilon(1e-14));
    }
    {
        // all asserted suprema lie in (0, 2]
        for (const KernelSpec& k : {KernelSpec::riesz(0.3), KernelSpec::bessel(4.0),
                                    KernelSpec::fractional(0.9, 0.9, 0.9)}) {
            const PredictedExponents p = predicted_exponents(k);
            for (const auto& v : {p.nu_sup, p.gamma_sup, p.gamma_prime_sup, p.rho1_sup, p.rho2_sup}) {
                if (v) {
                    CHECK(*v > 0.0);
                    CHECK(*v <= 2.0);
                }
            }
        }
    }
}
