#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace finwalk {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, stream, substream); draws with equal addresses are identical no
// matter which thread produces them, which is what makes per-path streams
// reproducible under any parallel schedule. Streams are limited to 2^48
// distinct ids, substreams to 2^16.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0, std::uint32_t substream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        hi_{static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(((stream >> 32) & 0xFFFFu) | (substream << 16))} {}

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = kMul0 * static_cast<std::uint64_t>(ctr[0]);
      const std::uint64_t p1 = kMul1 * static_cast<std::uint64_t>(ctr[2]);
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += kBump0;
      key[1] += kBump1;
    }
    return ctr;
  }

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2511F53u;
  static constexpr std::uint64_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kBump0 = 0x9E3779B9u;
  static constexpr std::uint32_t kBump1 = 0xBB67AE85u;

  void refill() {
    buf_ = block({static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                  hi_[0], hi_[1]},
                 key_);
    ++index_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> hi_;
  std::uint64_t index_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace finwalk
