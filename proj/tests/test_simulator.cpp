#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wavecov/moments.hpp"
#include "wavecov/simulator.hpp"

using namespace wavecov;
using Catch::Approx;

TEST_CASE("mode sets: weights, masses, and validation", "[simulator]") {
    const KernelSpec kf = KernelSpec::fractional(0.8, 0.8, 0.8);
    const ModeSet lattice = build_mode_set(kf, 64.0, 16, ModeScheme::OffsetLattice);
    CHECK(lattice.size() == 4096);
    double total = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        CHECK(lattice.weights[i] >= 0.0);
        // offset lattice keeps every frequency off the coordinate planes
        CHECK(std::abs(lattice.frequencies[i].x1) > 1e-12);
        CHECK(std::abs(lattice.frequencies[i].x2) > 1e-12);
        CHECK(std::abs(lattice.frequencies[i].x3) > 1e-12);
        total += lattice.weights[i];
    }
    // exact box mass: pref * prod_i 2 cutoff^{2-2H}/(2-2H)
    const double pref = kf.spectral_density().axis_prefactor();
    const double per_axis = 2.0 * std::pow(64.0, 0.4) / 0.4;
    CHECK(total == Approx(pref * per_axis * per_axis * per_axis).epsilon(1e-10));
    CHECK(lattice.captured_mass > 0.0);
    CHECK(lattice.captured_mass <= 1.0);

    const KernelSpec kr = KernelSpec::riesz(1.0);
    const ModeSet radial = build_mode_set(kr, 64.0, 24, ModeScheme::RadialAngular);
    double rtotal = 0.0;
    for (double w : radial.weights) {
        CHECK(w >= 0.0);
        rtotal += w;
    }
    // closed form: int_{|xi|<=L} C_R |xi|^{-2} dxi = 4 pi C_R L
    const double cr = constants::riesz_c3(1.0) / std::pow(2.0 * pi, 3.0);
    CHECK(rtotal == Approx(four_pi * cr * 64.0).epsilon(0.02));
    CHECK_FALSE(radial.low_mass_warning);

    CHECK_THROWS_AS(build_mode_set(kf, 64.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(build_mode_set(kf, 0.0, 16), std::invalid_argument);
    // low cutoff leaves mass outside: warning flag, not failure
    const ModeSet low = build_mode_set(kf, 2.0, 8, ModeScheme::OffsetLattice);
    CHECK(low.low_mass_warning);
}

TEST_CASE("per-mode time covariance: closed form vs quadrature, PSD, limits", "[simulator]") {
    // closed form against a direct s-quadrature of sin((tj-s)r) sin((tl-s)r)/r^2
    for (auto [tj, tl, r] : {std::tuple{0.3, 0.9, 2.0}, std::tuple{1.0, 1.0, 5.0},
                             std::tuple{0.5, 2.0, 0.4}, std::tuple{0.25, 0.75, 31.0},
                             std::tuple{0.5, 1.5, 0.01}}) {
        const Rule1D s_rule = panel(0.0, std::min(tj, tl), 48);
        const double raw = apply_rule(s_rule, [&, tl_ = tl, tj_ = tj, r_ = r](double s) {
            return std::sin((tj_ - s) * r_) * std::sin((tl_ - s) * r_) / (r_ * r_);
        });
        CHECK(mode_time_covariance_entry(r, tj, tl) == Approx(raw).margin(1e-12 + 1e-10 * std::abs(raw)));
    }
    // continuity across the closed-form/quadrature switch at r * t_max = 0.5
    {
        const double t = 1.0;
        const double r_lo = 0.5 / t * (1.0 - 1e-9), r_hi = 0.5 / t * (1.0 + 1e-9);
        CHECK(mode_time_covariance_entry(r_lo, t, t) ==
              Approx(mode_time_covariance_entry(r_hi, t, t)).epsilon(1e-9));
    }
    // single time: Sigma_11 = [t - sin(2 t r)/(2r)]/(2 r^2)
    const double t = 0.7, r = 3.0;
    CHECK(mode_time_covariance_entry(r, t, t) ==
          Approx((t - std::sin(2 * t * r) / (2 * r)) / (2 * r * r)).epsilon(1e-13));
    // duplicated time: rank-1 block
    const std::vector<double> cov = mode_time_covariance(r, {t, t});
    CHECK(cov[1] == cov[0]);
    CHECK(cov[3] == cov[0]);
    // large r: Sigma_11 ~ t/(2 r^2) -> 0
    CHECK(mode_time_covariance_entry(1e4, t, t) == Approx(t / (2.0 * 1e8)).epsilon(1e-3));
    // PSD over an ordered grid (Cholesky succeeds inside simulate_field)
    const std::vector<double> big = mode_time_covariance(2.0, {0.2, 0.5, 0.9, 1.4});
    CHECK(detail::cholesky_psd(big, 4).size() == 16);
    CHECK_THROWS_AS(mode_time_covariance(2.0, {0.9, 0.2}), std::invalid_argument);
}

TEST_CASE("field synthesis: determinism and zero initial data", "[simulator]") {
    const KernelSpec k = KernelSpec::fractional(0.8, 0.8, 0.8);
    const ModeSet modes = build_mode_set(k, 16.0, 8, ModeScheme::OffsetLattice);
    const std::vector<Point3> pts{{0, 0, 0}, {0.25, 0, 0}};
    const FieldSample a = simulate_field(modes, {0.5, 1.0}, pts, 16, 77);
    const FieldSample b = simulate_field(modes, {0.5, 1.0}, pts, 16, 77);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    const FieldSample c = simulate_field(modes, {0.5, 1.0}, pts, 16, 78);
    CHECK(c.values[0] != a.values[0]);

    // t = 0 gives the zero field (vanishing initial conditions)
    const FieldSample z = simulate_field(modes, {0.0}, pts, 4, 1);
    for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("law at truncation: variance, covariance probe, Gaussianity", "[simulator]") {
    const KernelSpec k = KernelSpec::fractional(0.8, 0.8, 0.8);
    const ModeSet modes = build_mode_set(k, 64.0, 16, ModeScheme::OffsetLattice);
    const std::size_t n = 2000;
    const std::vector<Point3> pts{{0, 0, 0}, {0.1, 0.2, -0.05}, {0.5, 0, 0}, {0.3, 0.3, 0.3}};
    const std::vector<double> times{0.5, 1.0};
    const FieldSample s = simulate_field(modes, times, pts, n, 42);

    // per-(t,x) mean within 3 sqrt(var/n); sample variance within 3 stderr of
    // the truncated reference sum_k w_k Sigma_jj(|xi_k|)
    for (std::size_t j = 0; j < times.size(); ++j)
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const double ref = truncated_covariance(modes, times[j], times[j], pts[p], pts[p]);
            double mean = 0.0, var = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += s.at(i, j, p);
            mean /= n;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = s.at(i, j, p) - mean;
                var += d * d;
            }
            var /= (n - 1);
            CHECK(std::abs(mean) <= 3.0 * std::sqrt(ref / n));
            CHECK(std::abs(var - ref) <= 3.0 * ref * std::sqrt(2.0 / n));
        }

    // cross covariance on the probe set
    for (std::size_t p = 1; p < pts.size(); ++p) {
        const double ref = truncated_covariance(modes, times[1], times[1], pts[0], pts[p]);
        const double v00 = truncated_covariance(modes, times[1], times[1], pts[0], pts[0]);
        const double vpp = truncated_covariance(modes, times[1], times[1], pts[p], pts[p]);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += s.at(i, 1, 0) * s.at(i, 1, p);
        acc /= n;
        const double se = std::sqrt((v00 * vpp + ref * ref) / n);
        CHECK(std::abs(acc - ref) <= 3.0 * se);
    }

    // standardized marginal at (t,x) = (1, pts[1]): skewness and excess kurtosis
    {
        double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
        for (std::size_t i = 0; i < n; ++i) m1 += s.at(i, 1, 1);
        m1 /= n;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = s.at(i, 1, 1) - m1;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        CHECK(std::abs(m3 / std::pow(m2, 1.5)) < 0.1);
        CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 0.2);
    }
}

TEST_CASE("truncated variance is nondecreasing in the cutoff", "[simulator]") {
    // the lattice refines with the cutoff (fixed cell size), so growing the
    // box only adds nonnegative spectral mass
    const KernelSpec k = KernelSpec::fractional(0.8, 0.8, 0.8);
    double prev = 0.0;
    for (int cutoff : {8, 16, 32, 64}) {
        const ModeSet m = build_mode_set(k, double(cutoff), cutoff, ModeScheme::OffsetLattice);
        const double v = truncated_covariance(m, 1.0, 1.0, Point3{0, 0, 0}, Point3{0, 0, 0});
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("doubling the lattice resolution moves the truncated variance by < 1% (Riesz)",
          "[simulator]") {
    const KernelSpec k = KernelSpec::riesz(1.0);
    const ModeSet a = build_mode_set(k, 64.0, 24, ModeScheme::RadialAngular);
    const ModeSet b = build_mode_set(k, 64.0, 48, ModeScheme::RadialAngular);
    const double va = truncated_covariance(a, 1.0, 1.0, {0, 0, 0}, {0, 0, 0});
    const double vb = truncated_covariance(b, 1.0, 1.0, {0, 0, 0}, {0, 0, 0});
    CHECK(va == Approx(vb).epsilon(0.01));
}

TEST_CASE("empirical variogram: trivial inputs and error paths", "[simulator]") {
    FieldSample s;
    s.times = {1.0};
    s.points = {{0, 0, 0}, {0.5, 0, 0}};
    s.n_real = 8;
    s.values.assign(8 * 1 * 2, 3.25);  // constant field
    s.seed = 0;
    const VariogramCurve c = empirical_variogram(s, 0, {1, 0, 0}, {0.5});
    CHECK(c.values[0] == 0.0);
    CHECK(c.stderrs[0] == 0.0);
    // lag zero compares the base point with itself
    const VariogramCurve z = empirical_variogram(s, 0, {1, 0, 0}, {0.0});
    CHECK(z.values[0] == 0.0);
    CHECK_THROWS_WITH(empirical_variogram(s, 0, {1, 0, 0}, {0.25}),
                      Catch::Matchers::ContainsSubstring("missing"));
    CHECK_THROWS_AS(empirical_variogram(s, 3, {1, 0, 0}, {0.5}), std::invalid_argument);
}

TEST_CASE("Hoelder estimation from exact curves", "[simulator]") {
    // synthetic pure power
    VariogramCurve c;
    for (int e = -8; e <= -2; ++e) {
        const double h = std::pow(2.0, e);
        c.lags.push_back(h);
        c.values.push_back(2.7 * std::pow(h, 0.8));
    }
    const HolderEstimate he = estimate_holder(c);
    CHECK(he.holder == Approx(0.4).margin(1e-12));

    // Riesz beta=1 exact variogram: Hoelder (2-beta)/2 = 0.5
    const KernelSpec k = KernelSpec::riesz(1.0);
    VariogramCurve r;
    for (int e = -9; e <= -3; ++e) {
        const double h = std::pow(2.0, e);
        r.lags.push_back(h);
        r.values.push_back(spatial_variogram_exact(k, 1.0, Point3{h, 0, 0}).value);
    }
    const HolderEstimate hr = estimate_holder(r);
    CHECK(hr.holder == Approx(0.5).margin(0.05));
}

TEST_CASE("Monte Carlo variogram against the truncated reference and kappa_bar", "[simulator]") {
    // 4096 modes, 2000 realizations, fixed seed; lag window matched to the
    // scales the lattice resolves (calibrated once, frozen here)
    const KernelSpec k = KernelSpec::fractional(0.8, 0.8, 0.8);
    const ModeSet modes = build_mode_set(k, 64.0, 16, ModeScheme::OffsetLattice);
    const Point3 dir = normalized(Point3{1, 1, 1});
    std::vector<double> lags;
    for (int i = 0; i < 8; ++i) lags.push_back(0.09 * std::pow(1.0 / 0.09, i / 7.0));
    std::vector<Point3> pts{{0, 0, 0}};
    for (double l : lags) pts.push_back(l * dir);
    const FieldSample s = simulate_field(modes, {1.0}, pts, 2000, 42);
    const VariogramCurve c = empirical_variogram(s, 0, dir, lags);

    int ok = 0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const double ref = truncated_variogram(modes, 1.0, lags[i] * dir);
        if (std::abs(c.values[i] - ref) <= 3.0 * c.stderrs[i]) ++ok;
    }
    CHECK(ok >= 7);
    const HolderEstimate he = estimate_holder(c);
    CHECK(he.holder == Approx(0.4).margin(0.15));
}

TEST_CASE("Monte Carlo variogram matches the exact curve end to end", "[simulator]") {
    // finer lattice, larger lags: truncation bias below the Monte Carlo noise
    const KernelSpec k = KernelSpec::fractional(0.8, 0.8, 0.8);
    const ModeSet modes = build_mode_set(k, 48.0, 64, ModeScheme::OffsetLattice);
    const Point3 dir = normalized(Point3{1, 1, 1});
    std::vector<double> lags;
    for (int i = 0; i < 8; ++i) lags.push_back(0.4 * std::pow(1.4 / 0.4, i / 7.0));
    std::vector<Point3> pts{{0, 0, 0}};
    for (double l : lags) pts.push_back(l * dir);
    const FieldSample s = simulate_field(modes, {1.0}, pts, 200, 42);
    const VariogramCurve c = empirical_variogram(s, 0, dir, lags);
    int ok = 0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const double exact = spatial_variogram_exact(k, 1.0, lags[i] * dir).value;
        if (std::abs(c.values[i] - exact) <= 3.0 * c.stderrs[i]) ++ok;
    }
    CHECK(ok >= 7);
}
