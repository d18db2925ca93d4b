#include "empcal/random.hpp"

#include <boost/random/normal_distribution.hpp>

namespace empcal {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (const auto p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return RandomStream(h);
}

double RandomStream::normal() {
  // boost's ziggurat is fully specified, unlike std::normal_distribution.
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

}  // namespace empcal
