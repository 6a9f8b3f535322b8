#ifndef TCPWIN_RNG_HPP
#define TCPWIN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace tcpwin {

// Identifies one reproducible variate stream: the experiment-wide root seed
// plus the index of the stream (replica number, bootstrap lane, ...).
struct StreamSeed {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_index = 0;
};

// SplitMix64 step (Steele, Lea & Flood 2014). Used only to expand seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One independent stream of variates. Streams are addressed by
// (root_seed, stream_index), never by splitting at run time, so replica k
// always sees the same sequence no matter how work is scheduled across
// threads. A stream object is single-owner; distinct streams may be used
// concurrently from different workers.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_index)
      : seed_{root_seed, stream_index}, gen_(expand(root_seed, stream_index)) {}
  explicit RngStream(StreamSeed s) : RngStream(s.root_seed, s.stream_index) {}

  const StreamSeed& seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  // U uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // U uniform on (0,1]; never 0, so -log(U) is always finite.
  double uniform_open01() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Exp(1) by inversion.
  double exponential() { return -std::log(uniform_open01()); }

 private:
  static std::mt19937_64 expand(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root;
    (void)splitmix64_next(s);  // avalanche the root before mixing the index
    s ^= (index + 1) * 0xd2b74407b1ce6e93ULL;
    std::uint32_t words[16];
    for (int i = 0; i < 16; i += 2) {
      const std::uint64_t w = splitmix64_next(s);
      words[i] = static_cast<std::uint32_t>(w);
      words[i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return std::mt19937_64(seq);
  }

  StreamSeed seed_;
  std::mt19937_64 gen_;
};

inline double next_exponential(RngStream& stream) { return stream.exponential(); }

}  // namespace tcpwin

#endif  // TCPWIN_RNG_HPP
