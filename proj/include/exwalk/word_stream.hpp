#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "exwalk/lattice.hpp"

namespace exwalk {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3"). A pure function of a 128-bit counter and a 64-bit key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }
};

/// Identifies one independent letter stream.
///
/// The stream for (master_seed, stream_id) is the Philox4x32-10 output over
/// counters (block_lo, block_hi, stream_lo, stream_hi) under key
/// (master_lo, master_hi), block = 0, 1, 2, ... Each block yields two 64-bit
/// words, word = out[0] | out[1] << 32 then out[2] | out[3] << 32. Distinct
/// stream ids occupy disjoint counter ranges under one key.
struct StreamSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  StreamSeed offset(std::uint64_t k) const { return {master_seed, stream_id + k}; }
  friend bool operator==(const StreamSeed&, const StreamSeed&) = default;
};

/// Uniform letters over the 2d directions, plus raw words and uniforms drawn
/// from the same counter sequence. Letters are b-bit chunks of a word
/// (b = bit width of 2d - 1, low bits first); chunks >= 2d are rejected and
/// leftover bits that cannot form a full chunk are discarded.
class LetterStream {
 public:
  LetterStream(StreamSeed seed, int dim);

  const StreamSeed& seed() const { return seed_; }
  int dim() const { return dim_; }
  std::uint64_t letters_emitted() const { return emitted_; }
  std::uint64_t blocks_consumed() const { return block_; }

  std::uint64_t next_u64() {
    if (buf_pos_ == 2) refill();
    return buf_[buf_pos_++];
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_uniform() < p; }

  unsigned next_letter_index() {
    for (;;) {
      if (bits_left_ < bits_) {
        word_ = next_u64();
        bits_left_ = 64;
      }
      const auto v = static_cast<unsigned>(word_ & mask_);
      word_ >>= bits_;
      bits_left_ -= bits_;
      if (v < letters_) {
        ++emitted_;
        return v;
      }
    }
  }

  Direction next_letter() { return Direction::from_index(next_letter_index()); }

  /// Repositions the raw word sequence at `block` and drops buffered bits.
  void seek_block(std::uint64_t block);

 private:
  void refill();

  StreamSeed seed_;
  int dim_;
  unsigned letters_;
  unsigned bits_;
  std::uint64_t mask_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int buf_pos_ = 2;
  std::uint64_t word_ = 0;
  unsigned bits_left_ = 0;
  std::uint64_t emitted_ = 0;
};

}  // namespace exwalk
