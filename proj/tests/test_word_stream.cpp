#include <doctest.h>

#include <array>
#include <vector>

#include "exwalk/stats.hpp"
#include "exwalk/word_stream.hpp"

using namespace exwalk;

TEST_CASE("philox known answers") {
  const auto zero = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  CHECK(zero == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto ones = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                      {0xffffffffu, 0xffffffffu});
  CHECK(ones == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                    {0xa4093822u, 0x299f31d0u});
  CHECK(pi == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same seed gives the same letters") {
  LetterStream a({42, 7}, 2), b({42, 7}, 2);
  bool same = true;
  for (int i = 0; i < 1'000'000; ++i) same = same && a.next_letter_index() == b.next_letter_index();
  CHECK(same);
  CHECK(a.letters_emitted() == 1'000'000);
}

TEST_CASE("neighbouring stream ids diverge early") {
  LetterStream a({42, 7}, 2), b({42, 8}, 2);
  int first_diff = -1;
  for (int i = 0; i < 64 && first_diff < 0; ++i) {
    if (a.next_letter_index() != b.next_letter_index()) first_diff = i;
  }
  CHECK(first_diff >= 0);
}

TEST_CASE("letters stay in range for every dimension") {
  for (int d = 1; d <= kMaxDim; ++d) {
    LetterStream s({3, 0}, d);
    unsigned hi = 0;
    for (int i = 0; i < 20000; ++i) hi = std::max(hi, s.next_letter_index());
    CHECK(hi == 2u * static_cast<unsigned>(d) - 1);
  }
  CHECK_THROWS_AS(LetterStream({0, 0}, 0), RangeError);
  CHECK_THROWS_AS(LetterStream({0, 0}, kMaxDim + 1), RangeError);
}

TEST_CASE("letter counter") {
  LetterStream s({1, 1}, 3);
  for (int i = 0; i < 100; ++i) s.next_letter();
  CHECK(s.letters_emitted() == 100);
}

TEST_CASE("letter frequencies and pairs are uniform") {
  constexpr std::uint64_t n = 1'000'000;
  LetterStream s({2024, 0}, 2);
  std::array<std::uint64_t, 4> single{};
  std::array<std::uint64_t, 16> pairs{};
  unsigned prev = s.next_letter_index();
  ++single[prev];
  for (std::uint64_t i = 1; i < n; ++i) {
    const unsigned l = s.next_letter_index();
    ++single[l];
    ++pairs[prev * 4 + l];
    prev = l;
  }
  for (auto c : single) CHECK(std::abs(static_cast<double>(c) / n - 0.25) < 0.005);
  const std::vector<double> expect(16, 1.0 / 16);
  const auto chi = chi_square_test(pairs, expect);
  MESSAGE("pair chi-square p = " << chi.p_value);
  CHECK(chi.p_value > 1e-6);
}

TEST_CASE("six-letter streams are unbiased") {
  LetterStream s({9, 3}, 3);
  std::array<std::uint64_t, 6> c{};
  for (int i = 0; i < 600000; ++i) ++c[s.next_letter_index()];
  const std::vector<double> expect(6, 1.0 / 6);
  CHECK(chi_square_test(c, expect).p_value > 1e-6);
}

TEST_CASE("seeking replays a block") {
  LetterStream a({5, 5}, 2);
  std::vector<std::uint64_t> words;
  for (int i = 0; i < 10; ++i) words.push_back(a.next_u64());
  LetterStream b({5, 5}, 2);
  b.seek_block(3);
  CHECK(b.next_u64() == words[6]);
  CHECK(b.next_u64() == words[7]);
}
