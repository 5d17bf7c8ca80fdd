#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace hicov {

using Philox4x64Block = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(prod >> 64);
  lo = static_cast<std::uint64_t>(prod);
}

}  // namespace detail

// Philox4x64 with 10 rounds (Salmon et al., Random123). A pure function of
// (counter, key); streams are formed by walking the counter.
inline Philox4x64Block philox4x64_10(Philox4x64Block ctr, Philox4x64Key key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    detail::mulhilo64(kMul0, ctr[0], hi0, lo0);
    detail::mulhilo64(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// What a substream is used for; part of the Philox key so streams for
// different purposes never share counters.
enum class StreamPurpose : std::uint64_t {
  Dataset = 1,
  Mean = 2,
  Inequality = 3,
  Oracle = 4,
};

// Sequential view of one Philox substream. Satisfies
// UniformRandomBitGenerator, though the library only uses its own
// transforms so draws are identical on every platform.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(Philox4x64Key key, std::uint64_t word1, std::uint64_t word2, std::uint64_t word3)
      : key_(key), word1_(word1), word2_(word2), word3_(word3) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) {
      block_ = philox4x64_10({block_index_++, word1_, word2_, word3_}, key_);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  // Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t blocks_consumed() const noexcept { return block_index_; }

 private:
  Philox4x64Key key_;
  std::uint64_t word1_;
  std::uint64_t word2_;
  std::uint64_t word3_;
  std::uint64_t block_index_ = 0;
  Philox4x64Block block_{};
  int pos_ = 4;
};

// Substream for (master seed, purpose, grid index, replication index).
inline PhiloxStream substream(std::uint64_t master_seed, StreamPurpose purpose,
                              std::uint64_t grid_index, std::uint64_t replication) {
  return PhiloxStream({master_seed, static_cast<std::uint64_t>(purpose)}, replication, grid_index,
                      0);
}

}  // namespace hicov
