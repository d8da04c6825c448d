#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exwalk/induced_walk.hpp"
#include "exwalk/lattice.hpp"
#include "exwalk/stats.hpp"
#include "exwalk/word_stream.hpp"

namespace exwalk {

inline constexpr int kMaxLineIndex = 40;

/// x-coordinate 2^n - 1 of the n-th vertical line. RangeError for n outside [0, 40].
std::int64_t line_x(int n);

inline bool is_line(std::int64_t x) { return x >= 0 && std::has_single_bit(static_cast<std::uint64_t>(x) + 1); }

/// Gap index g with line_x(g) <= x < line_x(g + 1); requires x >= 0.
inline int gap_of(std::int64_t x) {
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(x) + 1)) - 1;
}

/// Present horizontal edges of one gap. Every Present run on a row starts at the
/// gap's left line, so a row is summarised by the farthest x it reaches.
class RowReach {
 public:
  explicit RowReach(std::int64_t base) : base_(base) {}

  std::int64_t base() const { return base_; }
  std::int64_t get(std::int64_t y) const {
    const std::int64_t i = y - y0_;
    return (i >= 0 && i < static_cast<std::int64_t>(v_.size())) ? v_[static_cast<std::size_t>(i)]
                                                                 : base_;
  }
  void raise(std::int64_t y, std::int64_t reach);

  /// Calls f(y, reach) for rows with at least one Present edge, in y order.
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (v_[i] > base_) f(y0_ + static_cast<std::int64_t>(i), v_[i]);
    }
  }

 private:
  std::int64_t base_;
  std::int64_t y0_ = 0;
  std::vector<std::int64_t> v_;
};

struct RevealEvent {
  std::int64_t x = 0;  // edge (x, y)-(x + 1, y)
  std::int64_t y = 0;
  std::uint64_t t = 0;  // letter-time of the revealing step (walk's own clock)
  int walk = 0;
};

/// The exceptional subgraph under construction. Vertical edges exist exactly on
/// the lines x = 2^n - 1; horizontal edges left of x = 0 are absent; gaps left of
/// the current stage are final (unrevealed edges there read as Absent); the gap
/// of the current stage holds Present stubs and Unrevealed edges; everything to
/// its right is Unrevealed.
class RevealedLattice {
 public:
  explicit RevealedLattice(bool audit = false);

  int stage() const { return stage_; }
  std::int64_t next_line() const { return next_line_; }

  EdgeState horizontal(std::int64_t x, std::int64_t y) const {  // (x,y)-(x+1,y)
    if (x < 0) return EdgeState::Absent;
    const int g = gap_of(x);
    if (g > stage_) return EdgeState::Unrevealed;
    if (x + 1 <= gaps_[static_cast<std::size_t>(g)].get(y)) return EdgeState::Present;
    return g < stage_ ? EdgeState::Absent : EdgeState::Unrevealed;
  }
  EdgeState vertical(std::int64_t x) const {
    return is_line(x) ? EdgeState::Present : EdgeState::Absent;
  }
  EdgeState query(const Edge& e) const;

  /// Revelation policy for a walk at (x, y) reading `letter` (0..3 = x,-x,y,-y).
  /// Rightward letters inside the current gap reveal the edge Present. A
  /// leftward letter meeting an Unrevealed edge raises NeverUnrevealedViolation.
  EdgeState resolve(std::int64_t x, std::int64_t y, unsigned letter, std::uint64_t t,
                    int walk = 0) {
    if (letter >= 2) return vertical(x);
    if (letter == 0) {
      if (x < 0) return EdgeState::Absent;
      const int g = gap_of(x);
      if (g < stage_) {
        return x + 1 <= gaps_[static_cast<std::size_t>(g)].get(y) ? EdgeState::Present
                                                                   : EdgeState::Absent;
      }
      if (g > stage_) throw_beyond(x, y);
      auto& row = gaps_.back();
      if (x + 1 > row.get(y)) {
        row.raise(y, x + 1);
        if (audit_) reveals_.push_back({x, y, t, walk});
      }
      return EdgeState::Present;
    }
    if (x - 1 < 0) return EdgeState::Absent;
    const EdgeState s = horizontal(x - 1, y);
    if (s == EdgeState::Unrevealed) throw_unrevealed_left(x, y);
    return s;
  }

  /// Finalizes the current gap and opens the next one.
  void complete_stage();

  std::int64_t reach(int gap, std::int64_t y) const { return gaps_.at(static_cast<std::size_t>(gap)).get(y); }
  const RowReach& gap(int g) const { return gaps_.at(static_cast<std::size_t>(g)); }
  /// Rows whose Present run spans the whole gap g.
  std::vector<std::int64_t> connecting_rows(int g) const;

  bool audit_enabled() const { return audit_; }
  const std::vector<RevealEvent>& reveals() const { return reveals_; }

  /// Every non-Unrevealed edge with both endpoints in the box.
  EdgeSnapshot snapshot(std::int64_t x_lo, std::int64_t x_hi, std::int64_t y_lo,
                        std::int64_t y_hi) const;

 private:
  [[noreturn]] void throw_beyond(std::int64_t x, std::int64_t y) const;
  [[noreturn]] void throw_unrevealed_left(std::int64_t x, std::int64_t y) const;

  int stage_ = 0;
  std::int64_t next_line_ = 1;
  std::vector<RowReach> gaps_;
  bool audit_ = false;
  std::vector<RevealEvent> reveals_;
};

struct StageRecord {
  std::uint64_t start_t = 0;  // letter-time at which the stage began
  std::uint64_t end_t = 0;    // letter-time of first arrival at the next line
  std::uint64_t start_accepted = 0;
  std::uint64_t end_accepted = 0;
  std::int64_t alpha = 0;  // row of the connecting segment
};

struct ExceptionalEnv {
  RevealedLattice lattice;
  std::vector<StageRecord> stage_history;  // completed stages
  std::vector<std::uint64_t> tau;           // tau[n]: first letter-time at x = line_x(n)
  std::vector<std::uint64_t> tau_accepted;  // same instants on the accepted-step clock
  std::int64_t y_min = 0;
  std::int64_t y_max = 0;

  explicit ExceptionalEnv(bool audit = false) : lattice(audit), tau{0}, tau_accepted{0} {}

  int stage() const { return lattice.stage(); }
  /// Rows bounding the explored region; snapshot box is x in [-1, next line],
  /// y in [y_min - 1, y_max + 1].
  EdgeSnapshot snapshot() const;
};

/// Single-walk entry point to the revelation policy for the walk sitting at `pos`.
EdgeState resolve_edge(ExceptionalEnv& env, const Site& pos, Direction letter);

/// One walk reading its own letter stream against a shared RevealedLattice.
class LatticeWalker {
 public:
  LatticeWalker(StreamSeed seed, int id = 0) : stream_(seed, 2), id_(id) {}

  std::int64_t x() const { return x_; }
  std::int64_t y() const { return y_; }
  std::uint64_t letters() const { return letters_; }
  std::uint64_t accepted() const { return accepted_; }
  int id() const { return id_; }
  const StreamSeed& seed() const { return stream_.seed(); }

  /// Reads one letter; returns whether the walk moved.
  bool step(RevealedLattice& h, WalkTranscript* tr) {
    const unsigned l = stream_.next_letter_index();
    const EdgeState s = h.resolve(x_, y_, l, letters_ + 1, id_);
    ++letters_;
    const bool acc = s == EdgeState::Present;
    if (acc) {
      ++accepted_;
      switch (l) {
        case 0: ++x_; break;
        case 1: --x_; break;
        case 2: ++y_; break;
        default: --y_; break;
      }
    }
    if (tr) tr->push_index(l, acc);
    return acc;
  }

 private:
  LetterStream stream_;
  int id_;
  std::int64_t x_ = 0;
  std::int64_t y_ = 0;
  std::uint64_t letters_ = 0;
  std::uint64_t accepted_ = 0;
};

struct StopRule {
  std::optional<std::uint64_t> max_letters;
  std::optional<int> max_stage;  // stop once this many stages are complete
};

struct ExceptionalRun {
  WalkTranscript transcript;
  ExceptionalEnv env;
};

ExceptionalRun run_exceptional(StreamSeed seed, StopRule stop, bool audit = false);

enum class ExcursionOutcome { PositiveSuccess, NegativeSuccess, Neither };
const char* outcome_name(ExcursionOutcome o);

struct Excursion {
  std::int64_t y = 0;
  std::uint64_t start_t = 0;
  std::uint64_t end_t = 0;  // time the row is left or the deciding line is hit
  std::int64_t x_min = 0;
  std::int64_t x_max = 0;
  ExcursionOutcome outcome = ExcursionOutcome::Neither;
  bool complete = true;  // false when the transcript ends mid-excursion
};

/// Excursions of the walk between tau_n and the first hit of line n-1 or n+1.
/// Requires n >= 1 and tau_n recorded (MissingTau otherwise).
std::vector<Excursion> excursion_decompose(const WalkTranscript& tr, const ExceptionalEnv& env,
                                           int n);

/// Accepted-move counts over [tau_n, T) used to check the excursion laws.
struct BoundaryLaw {
  std::uint64_t off_alpha_moves = 0;     // moves from line n on rows other than alpha
  std::uint64_t off_alpha_vertical = 0;  // ... that ended the excursion
  std::uint64_t alpha_moves = 0;         // moves from line n on row alpha
  std::uint64_t alpha_vertical = 0;
  std::uint64_t interior_left = 0;  // moves from x strictly between two lines
  std::uint64_t interior_right = 0;

  void merge(const BoundaryLaw& o);
};
BoundaryLaw stage_boundary_law(const WalkTranscript& tr, const ExceptionalEnv& env, int n);

/// Number of letter-times t in [1, T] with X(t) = line_x(k).
std::uint64_t line_visit_profile(const WalkTranscript& tr, const ExceptionalEnv& env, int k);

/// Monte Carlo estimate of the back-crossing probability at line n. Trial t uses
/// stream base_seed.offset(t). A trial is censored when `horizon_letters` letters
/// pass before the decision.
EnEstimate estimate_En(int n, std::uint64_t trials, StreamSeed base_seed,
                       std::uint64_t horizon_letters, unsigned jobs = 1);

/// Structural audit of a snapshot against the construction's invariants. Returns
/// human-readable violations (empty when consistent). `single_segment` demands
/// exactly one connecting segment per completed gap; otherwise between 1 and
/// `max_segments` are allowed.
std::vector<std::string> audit_structure(const EdgeSnapshot& snap, int completed_stages,
                                         bool single_segment = true, int max_segments = 1);

/// The same audit run directly against the lattice over x in [-1, next line] and
/// the given rows; avoids materialising a snapshot of a tall explored region.
std::vector<std::string> audit_lattice(const RevealedLattice& h, std::int64_t y_lo,
                                       std::int64_t y_hi, bool single_segment = true,
                                       int max_segments = 1);

/// Checks that every reveal event coincides with a left-to-right step of the
/// transcript at that letter-time.
std::vector<std::string> audit_reveals(const WalkTranscript& tr,
                                       const std::vector<RevealEvent>& reveals, int walk = 0);

}  // namespace exwalk
