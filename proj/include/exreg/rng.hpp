#ifndef EXREG_RNG_HPP
#define EXREG_RNG_HPP

#include <cstdint>
#include <random>

namespace exreg {

// Substream scheme: the master seed is mixed with a purpose tag and up to two
// indices (replicate, draw) through splitmix64. Every (purpose, replicate,
// draw) tuple owns an independent stream, so results do not depend on the
// order in which draws are evaluated.
enum class Stream : std::uint64_t {
  gaussian = 0x11,
  max_stable = 0x22,
  spectral = 0x33,
  replicate = 0x44,
};

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, Stream purpose, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64_next(s);
  s = h ^ static_cast<std::uint64_t>(purpose);
  h = splitmix64_next(s);
  s = h ^ a;
  h = splitmix64_next(s);
  s = h ^ b;
  return splitmix64_next(s);
}

inline std::mt19937_64 make_engine(std::uint64_t master, Stream purpose, std::uint64_t a = 0,
                                   std::uint64_t b = 0) {
  return std::mt19937_64(substream_seed(master, purpose, a, b));
}

}  // namespace exreg

#endif
