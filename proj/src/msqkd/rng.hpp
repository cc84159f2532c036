#pragma once

#include <cstdint>

namespace msqkd {

// Counter-based random stream keyed by (seed, stream id). Every protocol
// round owns the stream (seed, round index), so transcripts do not depend on
// execution order or thread count. The generator is SplitMix64, which is
// fully specified and therefore bit-reproducible across standard libraries
// (unlike std::uniform_real_distribution).
class RoundStream {
 public:
  RoundStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  // Standard normal deviate (Box-Muller, one value per call).
  double normal();

 private:
  std::uint64_t state_;
};

// Distinct stream ids for draws that are not tied to a protocol round.
namespace streams {
inline constexpr std::uint64_t kSampling = 0xA5A5'0000'0000'0001ULL;
inline constexpr std::uint64_t kReduction = 0xA5A5'0000'0000'0002ULL;
}  // namespace streams

}  // namespace msqkd
