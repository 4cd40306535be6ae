#ifndef FRACFLOW_RNG_HPP
#define FRACFLOW_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fracflow {

// Deterministic per-stream generator: xoshiro256++ state derived from
// (master_seed, stream) through splitmix64. Streams indexed by path (and
// coordinate) so that results do not depend on scheduling or worker count.
class PathRng {
 public:
  PathRng(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t x = master_seed ^ (stream * 0x9E3779B97F4A7C15ull) ^
                      0x632BE59BD9B4E019ull;
    for (auto& w : s_) w = splitmix64(x);
    for (int i = 0; i < 4; ++i) next_u64();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential() { return -std::log(next_double()); }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Knuth inversion; fine for the small means used in thinning.
  unsigned next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    unsigned k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > limit);
    return k - 1;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fracflow

#endif  // FRACFLOW_RNG_HPP
