#ifndef RINGPAIR_RNG_HPP
#define RINGPAIR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ringpair::rng {

// One splitmix64 step; used only to derive well-separated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic substream: seed and stream id are mixed through splitmix64
// into an mt19937_64 state. Variates are derived from uniform doubles with
// explicit algorithms (Box-Muller, inversion) so results do not depend on
// the standard library's unspecified distribution implementations.
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t s = seed;
        const std::uint64_t a = splitmix64(s);
        s = stream_id + 0xD1B54A32D192ED03ULL;
        const std::uint64_t b = splitmix64(s);
        engine_.seed(a ^ (b * 0x9E3779B97F4A7C15ULL));
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; both values of each pair are consumed
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // photon number of a thermal mode with the given mean: geometric with
    // success ratio q = mean/(1+mean), sampled by inversion
    std::uint64_t thermal_photons(double mean) {
        if (mean <= 0.0) return 0;
        const double q = mean / (1.0 + mean);
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(q)));
    }

    // thermal photon number conditioned on >= 1
    std::uint64_t thermal_photons_nonzero(double mean) {
        return 1 + thermal_photons(mean);  // geometric memorylessness
    }

    // binomial(n, 1/2) by direct coin flips; n stays tiny in all callers
    std::uint64_t half_binomial(std::uint64_t n) {
        std::uint64_t k = 0;
        for (std::uint64_t i = 0; i < n; ++i) k += uniform() < 0.5 ? 1 : 0;
        return k;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ringpair::rng

#endif
