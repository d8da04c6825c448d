#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "exwalk/lattice.hpp"
#include "exwalk/word_stream.hpp"

namespace exwalk {

struct WalkState {
  Site pos;
  std::uint64_t letters_consumed = 0;
  std::uint64_t accepted_steps = 0;
};

/// Letter-by-letter record of an induced walk. Entries are one byte each
/// (letter index in the low 7 bits, accepted flag in bit 7); positions are
/// recomputed from the start site unless full-position mode is on.
class WalkTranscript {
 public:
  WalkTranscript() = default;
  WalkTranscript(Site start, StreamSeed seed, bool keep_positions = false);

  const Site& start() const { return start_; }
  const StreamSeed& seed() const { return seed_; }
  int dim() const { return start_.dim(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  Direction letter(std::size_t i) const { return Direction::from_index(entries_[i] & 0x7f); }
  unsigned letter_index(std::size_t i) const { return entries_[i] & 0x7fu; }
  bool accepted(std::size_t i) const { return (entries_[i] & 0x80) != 0; }

  std::uint64_t accepted_steps() const { return accepted_; }
  const Site& final_position() const { return end_; }
  WalkState final_state() const { return {end_, entries_.size(), accepted_}; }

  void reserve(std::size_t n) { entries_.reserve(n); }
  void push(Direction letter, bool accepted);
  void push_index(unsigned letter, bool accepted);

  /// Position after `t` letters (t = 0 is the start).
  Site position_at(std::size_t t) const;
  /// All positions for t = 0..size(). Intended for short transcripts.
  std::vector<Site> positions() const;

  /// Calls f(t, pos_after, letter, accepted) for t = 1..size().
  template <typename F>
  void replay(F&& f) const {
    Site pos = start_;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const Direction d = letter(i);
      const bool acc = accepted(i);
      if (acc) pos[d.axis] += d.sign;
      f(i + 1, static_cast<const Site&>(pos), d, acc);
    }
  }

  friend bool operator==(const WalkTranscript& a, const WalkTranscript& b) {
    return a.start_ == b.start_ && a.seed_ == b.seed_ && a.entries_ == b.entries_;
  }

 private:
  Site start_;
  StreamSeed seed_;
  std::vector<std::uint8_t> entries_;
  Site end_;
  std::uint64_t accepted_ = 0;
  bool keep_positions_ = false;
  std::vector<Site> positions_;
};

/// One letter of the induced walk. Returns whether the step was accepted.
/// Throws UnrevealedEdge if the oracle leaves the edge Unrevealed.
bool induced_step(WalkState& state, Direction letter, SubgraphOracle& oracle);

WalkTranscript run_induced(LetterStream& stream, SubgraphOracle& oracle,
                           std::uint64_t horizon_letters);
WalkTranscript run_induced(LetterStream& stream, SubgraphOracle& oracle,
                           std::uint64_t horizon_letters, const Site& start);

/// Re-reads the transcript's letters against `oracle`, producing a fresh
/// transcript with the same seed.
WalkTranscript replay_letters(const WalkTranscript& letters, SubgraphOracle& oracle);

/// CSV `t,letter,accepted,x,y[,z...]`, one row per letter.
void write_transcript_csv(std::ostream& out, const WalkTranscript& tr);
void write_transcript_csv_file(const std::string& path, const WalkTranscript& tr);

}  // namespace exwalk
