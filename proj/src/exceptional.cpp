#include "exwalk/exceptional.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

#include "exwalk/parallel.hpp"

namespace exwalk {

std::int64_t line_x(int n) {
  if (n < 0 || n > kMaxLineIndex) {
    throw RangeError("line index " + std::to_string(n) + " outside [0, " +
                     std::to_string(kMaxLineIndex) + "]");
  }
  return (std::int64_t{1} << n) - 1;
}

// ---------------------------------------------------------------------------
// RowReach

void RowReach::raise(std::int64_t y, std::int64_t reach) {
  if (v_.empty()) {
    y0_ = y;
    v_.assign(1, base_);
  } else if (y < y0_) {
    const auto grow = static_cast<std::size_t>(std::max<std::int64_t>(y0_ - y, static_cast<std::int64_t>(v_.size())));
    v_.insert(v_.begin(), grow, base_);
    y0_ -= static_cast<std::int64_t>(grow);
  } else if (y - y0_ >= static_cast<std::int64_t>(v_.size())) {
    const auto need = static_cast<std::size_t>(y - y0_ + 1);
    v_.resize(std::max(need, 2 * v_.size()), base_);
  }
  auto& slot = v_[static_cast<std::size_t>(y - y0_)];
  slot = std::max(slot, reach);
}

// ---------------------------------------------------------------------------
// RevealedLattice

RevealedLattice::RevealedLattice(bool audit) : audit_(audit) { gaps_.emplace_back(0); }

EdgeState RevealedLattice::query(const Edge& e) const {
  if (e.low.dim() != 2) throw DimensionMismatch("exceptional subgraph lives in dimension 2");
  return e.axis == 0 ? horizontal(e.low[0], e.low[1]) : vertical(e.low[0]);
}

void RevealedLattice::complete_stage() {
  const std::int64_t base = line_x(stage_ + 1);
  const std::int64_t next = line_x(stage_ + 2);
  ++stage_;
  next_line_ = next;
  gaps_.emplace_back(base);
}

std::vector<std::int64_t> RevealedLattice::connecting_rows(int g) const {
  std::vector<std::int64_t> out;
  const std::int64_t right = line_x(g + 1);
  gap(g).for_each([&](std::int64_t y, std::int64_t r) {
    if (r >= right) out.push_back(y);
  });
  return out;
}

EdgeSnapshot RevealedLattice::snapshot(std::int64_t x_lo, std::int64_t x_hi, std::int64_t y_lo,
                                       std::int64_t y_hi) const {
  EdgeSnapshot snap;
  snap.dim = 2;
  for (std::int64_t y = y_lo; y <= y_hi; ++y) {
    for (std::int64_t x = x_lo; x <= x_hi; ++x) {
      if (x < x_hi) {
        const EdgeState h = horizontal(x, y);
        if (h != EdgeState::Unrevealed) snap.edges.emplace_back(Edge{Site{x, y}, 0}, h);
      }
      if (y < y_hi) snap.edges.emplace_back(Edge{Site{x, y}, 1}, vertical(x));
    }
  }
  return snap;
}

void RevealedLattice::throw_beyond(std::int64_t x, std::int64_t y) const {
  throw RangeError("position (" + std::to_string(x) + "," + std::to_string(y) +
                   ") lies beyond the gap of stage " + std::to_string(stage_));
}

void RevealedLattice::throw_unrevealed_left(std::int64_t x, std::int64_t y) const {
  throw NeverUnrevealedViolation("leftward letter at (" + std::to_string(x) + "," +
                                 std::to_string(y) + ") met an unrevealed edge in stage " +
                                 std::to_string(stage_));
}

EdgeSnapshot ExceptionalEnv::snapshot() const {
  return lattice.snapshot(-1, lattice.next_line(), y_min - 1, y_max + 1);
}

EdgeState resolve_edge(ExceptionalEnv& env, const Site& pos, Direction letter) {
  if (pos.dim() != 2) throw DimensionMismatch("exceptional subgraph lives in dimension 2");
  const std::uint64_t t = env.stage_history.empty() ? 0 : env.stage_history.back().end_t;
  return env.lattice.resolve(pos[0], pos[1], letter.index(), t);
}

// ---------------------------------------------------------------------------
// Runner

ExceptionalRun run_exceptional(StreamSeed seed, StopRule stop, bool audit) {
  if (!stop.max_letters && !stop.max_stage) {
    throw DomainError("stop rule needs max_letters or max_stage");
  }
  if (stop.max_stage && *stop.max_stage < 0) throw DomainError("max_stage must be >= 0");
  ExceptionalRun run{WalkTranscript(Site{0, 0}, seed), ExceptionalEnv(audit)};
  if (stop.max_stage && *stop.max_stage == 0) return run;

  auto& env = run.env;
  auto& h = env.lattice;
  const std::uint64_t limit = stop.max_letters.value_or(std::numeric_limits<std::uint64_t>::max());
  if (stop.max_letters) run.transcript.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(limit, 1u << 26)));

  LatticeWalker w(seed);
  std::uint64_t stage_start = 0, stage_start_acc = 0;
  while (w.letters() < limit) {
    if (!w.step(h, &run.transcript)) continue;
    env.y_min = std::min(env.y_min, w.y());
    env.y_max = std::max(env.y_max, w.y());
    if (w.x() != h.next_line()) continue;
    env.stage_history.push_back({stage_start, w.letters(), stage_start_acc, w.accepted(), w.y()});
    env.tau.push_back(w.letters());
    env.tau_accepted.push_back(w.accepted());
    h.complete_stage();
    stage_start = w.letters();
    stage_start_acc = w.accepted();
    if (stop.max_stage && h.stage() >= *stop.max_stage) break;
  }
  return run;
}

// ---------------------------------------------------------------------------
// Excursions

const char* outcome_name(ExcursionOutcome o) {
  switch (o) {
    case ExcursionOutcome::PositiveSuccess: return "positive";
    case ExcursionOutcome::NegativeSuccess: return "negative";
    case ExcursionOutcome::Neither: return "neither";
  }
  return "?";
}

namespace {

struct StageWindow {
  std::uint64_t tau = 0;
  std::int64_t alpha = 0;
  std::int64_t left = 0;   // line n-1
  std::int64_t mid = 0;    // line n
  std::int64_t right = 0;  // line n+1
};

StageWindow stage_window(const ExceptionalEnv& env, int n) {
  if (n < 1) throw DomainError("excursions need n >= 1 (line n-1 must exist)");
  if (static_cast<std::size_t>(n) >= env.tau.size()) {
    throw MissingTau("the walk never reached line " + std::to_string(n));
  }
  return {env.tau[static_cast<std::size_t>(n)], env.stage_history[static_cast<std::size_t>(n - 1)].alpha,
          line_x(n - 1), line_x(n), line_x(n + 1)};
}

// Calls f(t, px, py, x, y, letter, accepted) for every letter after tau_n until
// the first hit of the left or right line; returns false if the transcript ended
// first.
template <typename F>
bool scan_stage(const WalkTranscript& tr, const StageWindow& w, F&& f) {
  std::int64_t x = tr.start()[0], y = tr.start()[1];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const std::uint64_t t = i + 1;
    const std::int64_t px = x, py = y;
    const bool acc = tr.accepted(i);
    const unsigned l = tr.letter_index(i);
    if (acc) {
      switch (l) {
        case 0: ++x; break;
        case 1: --x; break;
        case 2: ++y; break;
        default: --y; break;
      }
    }
    if (t <= w.tau) continue;
    f(t, px, py, x, y, l, acc);
    if (x == w.left || x == w.right) return true;
  }
  return false;
}

}  // namespace

std::vector<Excursion> excursion_decompose(const WalkTranscript& tr, const ExceptionalEnv& env,
                                           int n) {
  const StageWindow w = stage_window(env, n);
  if (w.tau > tr.size()) throw MissingTau("transcript shorter than tau_n");
  const Site at_tau = tr.position_at(static_cast<std::size_t>(w.tau));
  std::vector<Excursion> out;
  Excursion cur{at_tau[1], w.tau, w.tau, at_tau[0], at_tau[0], ExcursionOutcome::Neither, true};
  const bool decided = scan_stage(tr, w, [&](std::uint64_t t, std::int64_t, std::int64_t py,
                                             std::int64_t x, std::int64_t y, unsigned, bool) {
    if (y != py) {
      cur.end_t = t;
      out.push_back(cur);
      cur = Excursion{y, t, t, x, x, ExcursionOutcome::Neither, true};
      return;
    }
    cur.x_min = std::min(cur.x_min, x);
    cur.x_max = std::max(cur.x_max, x);
    if (x == w.right || x == w.left) {
      cur.end_t = t;
      cur.outcome = x == w.right ? ExcursionOutcome::PositiveSuccess : ExcursionOutcome::NegativeSuccess;
      out.push_back(cur);
    }
  });
  if (!decided) {
    cur.end_t = tr.size();
    cur.complete = false;
    out.push_back(cur);
  }
  return out;
}

void BoundaryLaw::merge(const BoundaryLaw& o) {
  off_alpha_moves += o.off_alpha_moves;
  off_alpha_vertical += o.off_alpha_vertical;
  alpha_moves += o.alpha_moves;
  alpha_vertical += o.alpha_vertical;
  interior_left += o.interior_left;
  interior_right += o.interior_right;
}

BoundaryLaw stage_boundary_law(const WalkTranscript& tr, const ExceptionalEnv& env, int n) {
  const StageWindow w = stage_window(env, n);
  BoundaryLaw law;
  scan_stage(tr, w, [&](std::uint64_t, std::int64_t px, std::int64_t py, std::int64_t,
                        std::int64_t, unsigned l, bool acc) {
    if (!acc) return;
    const bool vertical = l >= 2;
    if (px == w.mid) {
      if (py == w.alpha) {
        ++law.alpha_moves;
        if (vertical) ++law.alpha_vertical;
      } else {
        ++law.off_alpha_moves;
        if (vertical) ++law.off_alpha_vertical;
      }
    } else if (!is_line(px)) {
      if (l == 0) ++law.interior_right;
      if (l == 1) ++law.interior_left;
    }
  });
  return law;
}

std::uint64_t line_visit_profile(const WalkTranscript& tr, const ExceptionalEnv&, int k) {
  if (k < 0) throw RangeError("line index must be non-negative");
  if (k > kMaxLineIndex) return 0;
  const std::int64_t lx = line_x(k);
  std::uint64_t count = 0;
  std::int64_t x = tr.start()[0];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.accepted(i)) {
      const unsigned l = tr.letter_index(i);
      if (l == 0) ++x;
      if (l == 1) --x;
    }
    if (x == lx) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// E_n estimation

namespace {

enum class TrialOutcome : std::uint8_t { Hit, Completion, Censored };

}  // namespace

EnEstimate estimate_En(int n, std::uint64_t trials, StreamSeed base_seed,
                       std::uint64_t horizon_letters, unsigned jobs) {
  if (n < 1) throw DomainError("E_n needs n >= 1 (line n-1 must exist)");
  const std::int64_t left = line_x(n - 1);
  line_x(n + 1);
  if (trials < 1) throw DomainError("trials must be >= 1");

  auto outcomes = map_indices<TrialOutcome>(trials, jobs, [&](std::size_t t) {
    RevealedLattice h;
    LatticeWalker w(base_seed.offset(t));
    while (w.letters() < horizon_letters) {
      if (!w.step(h, nullptr)) continue;
      if (w.x() == h.next_line()) {
        if (h.stage() == n) return TrialOutcome::Completion;
        h.complete_stage();
        continue;
      }
      if (h.stage() == n && w.x() == left) return TrialOutcome::Hit;
    }
    return TrialOutcome::Censored;
  });

  EnEstimate est;
  est.n = n;
  est.trials = trials;
  for (auto o : outcomes) {
    switch (o) {
      case TrialOutcome::Hit: ++est.hits; break;
      case TrialOutcome::Completion: ++est.completions; break;
      case TrialOutcome::Censored: ++est.censored; break;
    }
  }
  est.finalize();
  return est;
}

// ---------------------------------------------------------------------------
// Audits

namespace {

constexpr std::size_t kMaxReported = 100;

// q(x, y, axis) yields the state of the edge at low corner (x, y), or nothing
// when the edge is not part of the audited data.
template <typename Q>
std::vector<std::string> audit_core(Q&& q, std::int64_t x_lo, std::int64_t x_hi, std::int64_t y_lo,
                                    std::int64_t y_hi, int completed_stages, bool single_segment,
                                    int max_segments) {
  std::vector<std::string> bad;
  auto report = [&](std::string msg) {
    if (bad.size() < kMaxReported) bad.push_back(std::move(msg));
  };
  for (std::int64_t y = y_lo; y <= y_hi; ++y) {
    for (std::int64_t x = x_lo; x <= x_hi; ++x) {
      if (auto v = q(x, y, 1); v && (*v == EdgeState::Present) != is_line(x)) {
        report("vertical edge at x=" + std::to_string(x) + " y=" + std::to_string(y) + " is " +
               edge_state_name(*v));
      }
      if (x >= 0) continue;
      if (auto h = q(x, y, 0); h && *h != EdgeState::Absent) {
        report("horizontal edge left of the first line is " + std::string(edge_state_name(*h)) +
               " at y=" + std::to_string(y));
      }
    }
  }
  for (int g = 0; g < completed_stages; ++g) {
    const std::int64_t a = line_x(g), b = line_x(g + 1);
    if (a < x_lo || b > x_hi) {
      report("gap " + std::to_string(g) + " lies outside the audited box");
      continue;
    }
    int connecting = 0, left_edges = 0;
    for (std::int64_t y = y_lo; y <= y_hi; ++y) {
      bool prefix = true;
      std::int64_t run = 0;
      for (std::int64_t x = a; x < b; ++x) {
        const auto st = q(x, y, 0);
        if (!st || *st == EdgeState::Unrevealed) {
          report("gap " + std::to_string(g) + " edge at x=" + std::to_string(x) + " y=" +
                 std::to_string(y) + " is unresolved in a finalized gap");
          prefix = false;
          break;
        }
        if (*st == EdgeState::Present) {
          if (!prefix) {
            report("gap " + std::to_string(g) + " row " + std::to_string(y) +
                   " has a present edge detached from its left line");
          }
          ++run;
        } else {
          prefix = false;
        }
      }
      if (run == b - a) ++connecting;
      if (auto last = q(b - 1, y, 0); last && *last == EdgeState::Present) ++left_edges;
    }
    const int allowed = single_segment ? 1 : max_segments;
    if (connecting < 1 || connecting > allowed) {
      report("gap " + std::to_string(g) + " has " + std::to_string(connecting) +
             " connecting segments");
    }
    if (single_segment && left_edges != 1) {
      report("line " + std::to_string(g + 1) + " has " + std::to_string(left_edges) +
             " present edges on its left");
    }
  }
  return bad;
}

}  // namespace

std::vector<std::string> audit_structure(const EdgeSnapshot& snap, int completed_stages,
                                         bool single_segment, int max_segments) {
  if (snap.dim != 2) return {"snapshot is not two-dimensional"};
  if (snap.edges.empty()) {
    if (completed_stages > 0) return {"snapshot is empty but stages were completed"};
    return {};
  }
  std::map<std::tuple<std::int64_t, std::int64_t, int>, EdgeState> edges;
  std::int64_t x_lo = std::numeric_limits<std::int64_t>::max(), x_hi = std::numeric_limits<std::int64_t>::min();
  std::int64_t y_lo = x_lo, y_hi = x_hi;
  for (const auto& [e, st] : snap.edges) {
    edges[{e.low[0], e.low[1], e.axis}] = st;
    const Site h = e.high();
    x_lo = std::min(x_lo, e.low[0]);
    y_lo = std::min(y_lo, e.low[1]);
    x_hi = std::max(x_hi, h[0]);
    y_hi = std::max(y_hi, h[1]);
  }
  auto q = [&](std::int64_t x, std::int64_t y, int axis) -> std::optional<EdgeState> {
    auto it = edges.find({x, y, axis});
    if (it == edges.end()) return std::nullopt;
    return it->second;
  };
  return audit_core(q, x_lo, x_hi, y_lo, y_hi, completed_stages, single_segment, max_segments);
}

std::vector<std::string> audit_lattice(const RevealedLattice& h, std::int64_t y_lo,
                                       std::int64_t y_hi, bool single_segment, int max_segments) {
  auto q = [&](std::int64_t x, std::int64_t y, int axis) -> std::optional<EdgeState> {
    return axis == 0 ? h.horizontal(x, y) : h.vertical(x);
  };
  return audit_core(q, -1, h.next_line(), y_lo, y_hi, h.stage(), single_segment, max_segments);
}

std::vector<std::string> audit_reveals(const WalkTranscript& tr,
                                       const std::vector<RevealEvent>& reveals, int walk) {
  std::vector<std::string> bad;
  std::map<std::uint64_t, const RevealEvent*> by_time;
  for (const auto& r : reveals) {
    if (r.walk == walk) by_time[r.t] = &r;
  }
  std::int64_t x = tr.start()[0], y = tr.start()[1];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const std::uint64_t t = i + 1;
    auto it = by_time.find(t);
    if (it != by_time.end()) {
      const RevealEvent& r = *it->second;
      if (!(tr.accepted(i) && tr.letter_index(i) == 0 && r.x == x && r.y == y)) {
        bad.push_back("reveal at t=" + std::to_string(t) + " does not match a rightward step");
      }
      by_time.erase(it);
    }
    if (tr.accepted(i)) {
      switch (tr.letter_index(i)) {
        case 0: ++x; break;
        case 1: --x; break;
        case 2: ++y; break;
        default: --y; break;
      }
    }
  }
  for (const auto& [t, r] : by_time) {
    bad.push_back("reveal at t=" + std::to_string(t) + " beyond the transcript");
  }
  return bad;
}

}  // namespace exwalk
