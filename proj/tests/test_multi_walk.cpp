#include <doctest.h>

#include <sstream>

#include "exwalk/multi_walk.hpp"

using namespace exwalk;

namespace {

std::string text(const EdgeSnapshot& s) {
  std::ostringstream out;
  write_snapshot(out, s);
  return out.str();
}

MultiStop phases(int p) {
  MultiStop s;
  s.max_phase = p;
  return s;
}

}  // namespace

TEST_CASE("one walk reduces to the exceptional construction") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto multi = run_multiwalk({s, 0}, 1, phases(5));
    const auto single = run_exceptional({s, 0}, StopRule{std::nullopt, 5});
    REQUIRE(multi.transcripts.size() == 1);
    CHECK(multi.transcripts[0] == single.transcript);
    CHECK(text(multi.snapshot()) == text(single.env.snapshot()));
    CHECK(multi.tau[0] == single.env.tau);
  }
}

TEST_CASE("multi-walk runs are reproducible") {
  const auto a = run_multiwalk({12, 0}, 3, phases(4));
  const auto b = run_multiwalk({12, 0}, 3, phases(4));
  CHECK(text(a.snapshot()) == text(b.snapshot()));
  CHECK(a.transcripts == b.transcripts);
}

TEST_CASE("walks join one per phase and freeze on the next line") {
  MultiStop stop = phases(5);
  stop.phase_letter_cap = 100'000'000;
  int done = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto run = run_multiwalk({s, 1}, 3, stop);
    if (run.aborted) continue;
    ++done;
    CHECK(run.phases_completed() == 5);
    std::vector<int> per_phase(5, 0);
    for (const auto& row : run.phase_log) {
      ++per_phase[static_cast<std::size_t>(row.phase)];
      CHECK(row.walk <= std::min(row.phase + 1, 3));
      const auto& tr = run.transcripts[static_cast<std::size_t>(row.walk - 1)];
      CHECK(tr.position_at(row.freeze_t)[0] == line_x(row.phase + 1));
      CHECK(tr.position_at(row.entry_t)[0] == line_x(row.phase));
      CHECK(row.entry_t <= row.freeze_t);
    }
    CHECK(per_phase == std::vector<int>{1, 2, 3, 3, 3});
  }
  CHECK(done >= 15);
}

TEST_CASE("connecting segments per gap stay within the number of active walks") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto run = run_multiwalk({s, 2}, 3, phases(3));
    const auto c = run.connecting_segments(2);
    CHECK(c >= 1);
    CHECK(c <= 3);
    CHECK(audit_lattice(run.lattice, run.y_min - 1, run.y_max + 1, false, 3).empty());
  }
}

TEST_CASE("every walk replays against the shared snapshot") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 30 && checked < 10; ++s) {
    const auto run = run_multiwalk({s, 3}, 3, phases(4));
    if (run.y_max - run.y_min > 300) continue;
    ++checked;
    SubgraphOracle g(snapshot_to_finite(run.snapshot()));
    for (const auto& tr : run.transcripts) CHECK(replay_letters(tr, g) == tr);
  }
  CHECK(checked >= 5);
}

TEST_CASE("phase letter cap aborts") {
  MultiStop stop = phases(6);
  stop.phase_letter_cap = 5;
  bool any = false;
  for (std::uint64_t s = 0; s < 10; ++s) any = any || run_multiwalk({s, 4}, 2, stop).aborted;
  CHECK(any);
  CHECK_THROWS_AS(run_multiwalk({0, 0}, 0, phases(1)), DomainError);
}

TEST_CASE("multi-walk back-crossing estimates") {
  const auto zero = estimate_Eni(3, 2, 20, {1, 0}, 0);
  CHECK(zero.censored == 20);
  CHECK_FALSE(zero.p_hat);
  CHECK_THROWS_AS(estimate_Eni(2, 3, 10, {1, 0}, 100), DomainError);

  const auto one = estimate_Eni(2, 1, 2000, {5, 0}, 10'000'000, 1);
  const auto direct = estimate_En(2, 2000, {6, 0}, 10'000'000);
  MESSAGE("multi " << *one.p_hat << " direct " << *direct.p_hat);
  CHECK(one.wilson_ci.overlaps(direct.wilson_ci));
}
