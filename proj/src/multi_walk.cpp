#include "exwalk/multi_walk.hpp"

#include <algorithm>
#include <limits>

#include "exwalk/parallel.hpp"

namespace exwalk {

EdgeSnapshot MultiWalkRun::snapshot() const {
  return lattice.snapshot(-1, lattice.next_line(), y_min - 1, y_max + 1);
}

namespace {

enum class DriveEnd { Stopped, Observer, Budget, Aborted };

// Runs phases until the stop rule, the letter budget or the observer ends it.
// obs(phase, walk_index, walker) runs after every letter; returning true stops.
template <typename Obs>
DriveEnd drive(MultiWalkRun& run, const MultiStop& stop, bool keep, Obs&& obs) {
  const std::uint64_t budget = stop.max_letters.value_or(std::numeric_limits<std::uint64_t>::max());
  std::uint64_t total = 0;
  for (auto& w : run.walkers) total += w.letters();

  auto step = [&](std::size_t j, int phase) {
    auto& w = run.walkers[j];
    const bool acc = w.step(run.lattice, keep ? &run.transcripts[j] : nullptr);
    ++total;
    if (acc) {
      run.y_min = std::min(run.y_min, w.y());
      run.y_max = std::max(run.y_max, w.y());
      auto& tau = run.tau[j];
      if (static_cast<int>(tau.size()) <= kMaxLineIndex &&
          w.x() == line_x(static_cast<int>(tau.size()))) {
        tau.push_back(w.letters());
      }
    }
    return obs(phase, j, w);
  };

  while (!stop.max_phase || run.phases_completed() < *stop.max_phase) {
    const int i = run.phases_completed();
    const std::int64_t left = line_x(i);
    const std::int64_t right = run.lattice.next_line();
    const std::uint64_t phase_start = total;
    auto over_cap = [&] {
      if (total - phase_start <= stop.phase_letter_cap) return false;
      run.aborted = true;
      run.abort_reason = "phase " + std::to_string(i) + " exceeded the letter cap";
      return true;
    };

    if (i < run.k) {
      run.walkers.emplace_back(run.base_seed.offset(static_cast<std::uint64_t>(i)), i + 1);
      run.transcripts.emplace_back(Site{0, 0}, run.base_seed.offset(static_cast<std::uint64_t>(i)));
      run.tau.push_back({0});
      const std::size_t j = run.walkers.size() - 1;
      while (run.walkers[j].x() != left) {
        if (total >= budget) return DriveEnd::Budget;
        if (step(j, i)) return DriveEnd::Observer;
        if (over_cap()) return DriveEnd::Aborted;
      }
    }

    const std::size_t active = run.walkers.size();
    std::vector<PhaseLogRow> rows(active);
    std::vector<bool> frozen(active, false);
    std::size_t live = active;
    for (std::size_t j = 0; j < active; ++j) {
      rows[j] = {i, static_cast<int>(j) + 1, run.walkers[j].letters(), 0};
    }
    while (live > 0) {
      for (std::size_t j = 0; j < active; ++j) {
        if (frozen[j]) continue;
        if (total >= budget) return DriveEnd::Budget;
        if (step(j, i)) return DriveEnd::Observer;
        if (run.walkers[j].x() == right) {
          frozen[j] = true;
          rows[j].freeze_t = run.walkers[j].letters();
          --live;
        }
      }
      if (over_cap()) return DriveEnd::Aborted;
    }
    run.phase_log.insert(run.phase_log.end(), rows.begin(), rows.end());
    run.lattice.complete_stage();
  }
  return DriveEnd::Stopped;
}

}  // namespace

MultiWalkRun run_multiwalk(StreamSeed base_seed, int k, const MultiStop& stop,
                           bool keep_transcripts, bool audit) {
  if (k < 1) throw DomainError("multi-walk needs k >= 1");
  if (!stop.max_phase && !stop.max_letters) {
    throw DomainError("stop rule needs max_phase or max_letters");
  }
  MultiWalkRun run(k, base_seed, audit);
  drive(run, stop, keep_transcripts, [](int, std::size_t, const LatticeWalker&) { return false; });
  return run;
}

EnEstimate estimate_Eni(int n, int i, std::uint64_t trials, StreamSeed base_seed,
                        std::uint64_t horizon_letters, std::optional<int> k, unsigned jobs) {
  if (i < 1 || i > n) throw DomainError("E_{n,i} needs 1 <= i <= n");
  line_x(n + 1);
  const int walks = k.value_or(n + 1);
  if (walks < i) throw DomainError("walk index exceeds the number of walks");
  if (trials < 1) throw DomainError("trials must be >= 1");
  const std::int64_t back = line_x(n - 1), ahead = line_x(n + 1);

  enum Outcome : std::uint8_t { Hit, Completion, Censored };
  auto outcomes = map_indices<Outcome>(trials, jobs, [&](std::size_t t) {
    MultiWalkRun run(walks, base_seed.offset(kMultiTrialStride * t));
    MultiStop stop;
    stop.max_phase = n + 1;
    stop.max_letters = horizon_letters;
    Outcome out = Censored;
    const auto target = static_cast<std::size_t>(i - 1);
    drive(run, stop, false, [&](int phase, std::size_t j, const LatticeWalker& w) {
      if (phase != n || j != target) return false;
      if (w.x() == back) {
        out = Hit;
        return true;
      }
      if (w.x() == ahead) {
        out = Completion;
        return true;
      }
      return false;
    });
    return out;
  });

  EnEstimate est;
  est.n = n;
  est.trials = trials;
  for (auto o : outcomes) {
    if (o == Hit) ++est.hits;
    if (o == Completion) ++est.completions;
    if (o == Censored) ++est.censored;
  }
  est.finalize();
  return est;
}

}  // namespace exwalk
