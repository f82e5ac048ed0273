#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gaussreach {

/// Counter-based generator (Philox-4x32-10). A stream is addressed by
/// (seed, substream); draws within a stream are addressed by a 64-bit
/// counter. Streams never overlap and the draw sequence is independent of
/// scheduling, so Monte Carlo output is bit-reproducible for any worker
/// count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t substream)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        substream_(substream) {}

  std::uint64_t next_u64() {
    if (block_pos_ == 2) refill();
    return block_[block_pos_++];
  }

  /// Uniform on (0, 1]; never returns 0 so log() is safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = kTau * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr double kTau = 6.283185307179586476925286766559;

  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
  }
  static std::uint32_t mullo(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b);
  }

  void refill() {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(substream_);
    std::uint32_t c3 = static_cast<std::uint32_t>(substream_ >> 32);
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0 = mulhi(0xD2511F53u, c0), lo0 = mullo(0xD2511F53u, c0);
      std::uint32_t hi1 = mulhi(0xCD9E8D57u, c2), lo1 = mullo(0xCD9E8D57u, c2);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    block_[0] = (static_cast<std::uint64_t>(c1) << 32) | c0;
    block_[1] = (static_cast<std::uint64_t>(c3) << 32) | c2;
    block_pos_ = 0;
    ++counter_;
  }

  std::uint32_t key0_, key1_;
  std::uint64_t substream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> block_{};
  int block_pos_ = 2;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

/// Deterministically derives an independent master seed for cell `index` of a
/// study (per-seed cells, per-batch substreams). splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace gaussreach
