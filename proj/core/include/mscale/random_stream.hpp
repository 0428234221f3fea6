#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mscale {

/// Deterministic stream of uniform variates keyed by (seed, stream_id).
/// Streams with different ids are seeded through std::seed_seq from all four
/// 32-bit halves, so nearby ids do not produce correlated engines.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  static constexpr std::string_view algorithm =
      "mt19937_64 seeded by seed_seq(seed_lo, seed_hi, stream_lo, stream_hi); "
      "u = ((x >> 11) + 0.5) * 2^-53";

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace mscale
