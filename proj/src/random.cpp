#include "ecve/random.hpp"

namespace ecve {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (stream * 0xD1B54A32D192ED03ULL));
  h = splitmix64(h ^ (index * 0x8CB92BA72F3D8DD7ULL));
  return h;
}

} // namespace ecve
