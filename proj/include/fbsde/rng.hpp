#pragma once

#include <array>
#include <cstdint>

namespace fbsde {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123). Stateless: every
/// (key, counter) pair maps to four independent 32-bit words, so draws can be addressed
/// directly by path and step without sequencing.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Uniform in the open interval (0, 1) with 52 random bits.
double uniform_open(std::uint32_t hi, std::uint32_t lo);

/// Standard normal quantile.
double normal_quantile(double p);

/// Standard normal draw addressed by (seed, counter). Uses the first two words of the
/// Philox block and the inverse-CDF transform.
double normal_draw(std::uint64_t seed, PhiloxCounter counter);

/// Stream tags keep independent consumers of one seed from colliding.
enum class Stream : std::uint32_t {
    forward_paths = 0,
    nested_oracle = 1,
    fresh_samples = 2,
};

/// Normal draw for path `path` at step `step` of a given stream.
inline double path_normal(std::uint64_t seed, Stream stream, std::uint64_t path,
                          std::uint32_t step) {
    return normal_draw(seed, {static_cast<std::uint32_t>(path),
                              static_cast<std::uint32_t>(path >> 32), step,
                              static_cast<std::uint32_t>(stream)});
}

}  // namespace fbsde
