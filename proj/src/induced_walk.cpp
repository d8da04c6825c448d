#include "exwalk/induced_walk.hpp"

#include <fstream>
#include <ostream>

namespace exwalk {

WalkTranscript::WalkTranscript(Site start, StreamSeed seed, bool keep_positions)
    : start_(start), seed_(seed), end_(start), keep_positions_(keep_positions) {
  if (keep_positions_) positions_.push_back(start_);
}

void WalkTranscript::push(Direction letter, bool accepted) {
  push_index(letter.index(), accepted);
}

void WalkTranscript::push_index(unsigned letter, bool accepted) {
  entries_.push_back(static_cast<std::uint8_t>(letter | (accepted ? 0x80u : 0u)));
  if (accepted) {
    const Direction d = Direction::from_index(letter);
    end_[d.axis] += d.sign;
    ++accepted_;
  }
  if (keep_positions_) positions_.push_back(end_);
}

Site WalkTranscript::position_at(std::size_t t) const {
  if (t > entries_.size()) throw RangeError("transcript time beyond horizon");
  if (keep_positions_) return positions_[t];
  Site pos = start_;
  for (std::size_t i = 0; i < t; ++i) {
    if (accepted(i)) {
      const Direction d = letter(i);
      pos[d.axis] += d.sign;
    }
  }
  return pos;
}

std::vector<Site> WalkTranscript::positions() const {
  if (keep_positions_) return positions_;
  std::vector<Site> out;
  out.reserve(entries_.size() + 1);
  out.push_back(start_);
  replay([&](std::size_t, const Site& p, Direction, bool) { out.push_back(p); });
  return out;
}

bool induced_step(WalkState& state, Direction letter, SubgraphOracle& oracle) {
  const EdgeState st = oracle.resolve(state.pos, letter);
  if (st == EdgeState::Unrevealed) {
    throw UnrevealedEdge("oracle left edge at " + state.pos.to_string() + " " +
                         direction_name(letter) + " unrevealed");
  }
  ++state.letters_consumed;
  if (st != EdgeState::Present) return false;
  state.pos = neighbor(state.pos, letter);
  ++state.accepted_steps;
  return true;
}

WalkTranscript run_induced(LetterStream& stream, SubgraphOracle& oracle,
                           std::uint64_t horizon_letters) {
  return run_induced(stream, oracle, horizon_letters, Site::origin(oracle.dim()));
}

WalkTranscript run_induced(LetterStream& stream, SubgraphOracle& oracle,
                           std::uint64_t horizon_letters, const Site& start) {
  if (stream.dim() != oracle.dim() || start.dim() != oracle.dim()) {
    throw DimensionMismatch("stream, oracle and start site disagree on dimension");
  }
  WalkTranscript tr(start, stream.seed());
  tr.reserve(horizon_letters);
  WalkState state{start, 0, 0};
  for (std::uint64_t t = 0; t < horizon_letters; ++t) {
    const Direction d = stream.next_letter();
    tr.push(d, induced_step(state, d, oracle));
  }
  return tr;
}

WalkTranscript replay_letters(const WalkTranscript& letters, SubgraphOracle& oracle) {
  WalkTranscript tr(letters.start(), letters.seed());
  tr.reserve(letters.size());
  WalkState state{letters.start(), 0, 0};
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const Direction d = letters.letter(i);
    tr.push(d, induced_step(state, d, oracle));
  }
  return tr;
}

void write_transcript_csv(std::ostream& out, const WalkTranscript& tr) {
  static const char* kAxes = "xyzwabcd";
  out << "t,letter,accepted";
  for (int a = 0; a < tr.dim(); ++a) out << ',' << kAxes[a];
  out << '\n';
  tr.replay([&](std::size_t t, const Site& p, Direction d, bool acc) {
    out << t << ',' << direction_name(d) << ',' << (acc ? 1 : 0);
    for (int a = 0; a < p.dim(); ++a) out << ',' << p[a];
    out << '\n';
  });
}

void write_transcript_csv_file(const std::string& path, const WalkTranscript& tr) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open transcript file for writing: " + path);
  write_transcript_csv(f, tr);
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace exwalk
