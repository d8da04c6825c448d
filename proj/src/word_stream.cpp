#include "exwalk/word_stream.hpp"

namespace exwalk {

LetterStream::LetterStream(StreamSeed seed, int dim) : seed_(seed), dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw RangeError("letter stream dimension out of range");
  letters_ = 2u * static_cast<unsigned>(dim);
  bits_ = static_cast<unsigned>(std::bit_width(letters_ - 1));
  mask_ = (std::uint64_t{1} << bits_) - 1;
}

void LetterStream::refill() {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(seed_.stream_id),
                                static_cast<std::uint32_t>(seed_.stream_id >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed_.master_seed),
                            static_cast<std::uint32_t>(seed_.master_seed >> 32)};
  const auto out = Philox4x32::apply(ctr, key);
  buf_[0] = std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32);
  buf_[1] = std::uint64_t{out[2]} | (std::uint64_t{out[3]} << 32);
  buf_pos_ = 0;
  ++block_;
}

void LetterStream::seek_block(std::uint64_t block) {
  block_ = block;
  buf_pos_ = 2;
  bits_left_ = 0;
}

}  // namespace exwalk
