#pragma once

#include <cstdint>
#include <random>

namespace wavecov {

/// splitmix64 finalizer; used to derive independent substream seeds from
/// (seed, index) pairs so results do not depend on scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream. Gaussians come from an explicit Box-Muller
/// transform (not std::normal_distribution, whose algorithm is unspecified)
/// so that byte-identical reproducibility is a contract, not an accident.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Substream for worker/realization `index`; counter-based split.
    static RngStream substream(std::uint64_t seed, std::uint64_t index) {
        return RngStream(splitmix64(seed ^ splitmix64(index + 0x51700f6a35cull)));
    }

    /// Uniform on (0,1]; never returns 0 so log() is safe.
    double uniform() {
        const std::uint64_t u = engine_();
        return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    explicit RngStream(std::uint64_t, int);  // unused
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace wavecov
