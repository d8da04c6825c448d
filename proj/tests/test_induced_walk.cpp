#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exwalk/exceptional.hpp"
#include "exwalk/induced_walk.hpp"
#include "exwalk/oracles.hpp"

using namespace exwalk;

TEST_CASE("full lattice accepts every letter") {
  SubgraphOracle full(FullLattice{2});
  WalkState st{Site{0, 0}};
  for (unsigned i = 0; i < 4; ++i) CHECK(induced_step(st, Direction::from_index(i), full));
  CHECK(st.pos == Site{0, 0});
  CHECK(st.accepted_steps == 4);
  CHECK(st.letters_consumed == 4);
}

TEST_CASE("absent edges hold the walker in place") {
  ExplicitFinite g(Box::cube(2, 1));
  SubgraphOracle o(g);
  WalkState st{Site{0, 0}};
  CHECK_FALSE(induced_step(st, kPlusX, o));
  CHECK(st.pos == Site{0, 0});
  CHECK(st.letters_consumed == 1);
  CHECK(st.accepted_steps == 0);
}

TEST_CASE("vertical letters between lines are rejected") {
  ExceptionalEnv env;
  env.lattice.resolve(0, 0, 0, 1);
  env.lattice.complete_stage();
  CHECK(resolve_edge(env, Site{1, 0}, kPlusX) == EdgeState::Present);
  env.lattice.complete_stage();
  CHECK(resolve_edge(env, Site{2, 0}, kPlusY) == EdgeState::Absent);
  CHECK(resolve_edge(env, Site{3, 0}, kPlusY) == EdgeState::Present);
}

TEST_CASE("horizon zero gives an empty transcript") {
  LetterStream s({1, 0}, 2);
  SubgraphOracle full(FullLattice{2});
  const auto tr = run_induced(s, full, 0);
  CHECK(tr.empty());
  CHECK(tr.final_position() == Site{0, 0});
}

TEST_CASE("full lattice walk is the sum of its letters") {
  LetterStream s({77, 0}, 2), raw({77, 0}, 2);
  SubgraphOracle full(FullLattice{2});
  const auto tr = run_induced(s, full, 1'000'000);
  Site p{0, 0};
  bool ok = true;
  std::size_t i = 0;
  tr.replay([&](std::size_t, const Site& pos, Direction d, bool acc) {
    const Direction l = raw.next_letter();
    p[l.axis] += l.sign;
    ok = ok && acc && d == l && pos == p && tr.letter(i) == l;
    ++i;
  });
  CHECK(ok);
  CHECK(tr.accepted_steps() == 1'000'000);
  CHECK(tr.final_position() == p);
}

TEST_CASE("comb acceptance rate matches the exact rate") {
  const ExplicitFinite comb = comb_graph(10, 10);
  constexpr std::uint64_t n = 1'000'000;
  // symmetric kernel, so the stationary law is uniform on the component
  double deg = 0.0;
  const Box& box = comb.box();
  for (std::size_t i = 0; i < box.site_count(); ++i) deg += comb.degree(box.site_at(i));
  const double exact = deg / (4.0 * static_cast<double>(box.site_count()));
  CHECK(acceptance_rate_dp(comb, Site{0, 0}, 50000) == doctest::Approx(exact).epsilon(1e-9));

  LetterStream s({11, 0}, 2);
  SubgraphOracle o(comb);
  const auto tr = run_induced(s, o, n);
  const double emp = static_cast<double>(tr.accepted_steps()) / n;
  // successive letters are correlated, so the standard error comes from batch means
  MeanAccumulator batches;
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    acc += tr.accepted(i);
    if ((i + 1) % 20000 == 0) {
      batches.add(static_cast<double>(acc) / 20000);
      acc = 0;
    }
  }
  const double se = batches.std_error();
  MESSAGE("empirical " << emp << " exact " << exact << " se " << se);
  CHECK(std::abs(emp - exact) <= 3 * se);
}

TEST_CASE("walk never leaves the reachable component") {
  const Box box = Box::cube(2, 3);
  ExplicitFinite g(box);
  g.set_present(Site{0, 0}, kPlusX);
  g.set_present(Site{1, 0}, kPlusY);
  g.set_present(Site{1, 1}, kMinusX);
  g.set_present(Site{-1, -1}, kPlusX);
  const auto reach = reachable_sites(SubgraphOracle(g), Site{0, 0}, box);
  SubgraphOracle o(g);
  LetterStream s({4, 4}, 2);
  const auto tr = run_induced(s, o, 100000);
  bool inside = true;
  tr.replay([&](std::size_t, const Site& p, Direction, bool) {
    inside = inside && std::find(reach.begin(), reach.end(), p) != reach.end();
  });
  CHECK(inside);
  CHECK(replay_letters(tr, o) == tr);
}

TEST_CASE("subgraph and supergraph transcripts both replay") {
  const Box box = Box::cube(2, 2);
  ExplicitFinite small(box), big(box);
  small.set_present(Site{0, 0}, kPlusX);
  for (const auto& e : big.box_edges()) big.set(e, EdgeState::Present);
  SubgraphOracle os(small), ob(big);
  LetterStream a({8, 0}, 2), b({8, 0}, 2);
  const auto ts = run_induced(a, os, 5000);
  const auto tb = run_induced(b, ob, 5000);
  CHECK(replay_letters(ts, os) == ts);
  CHECK(replay_letters(tb, ob) == tb);
  for (std::size_t i = 0; i < ts.size(); ++i) REQUIRE(ts.letter(i) == tb.letter(i));
}

TEST_CASE("transcript positions and dump") {
  LetterStream s({3, 0}, 2);
  SubgraphOracle full(FullLattice{2});
  const auto tr = run_induced(s, full, 20);
  const auto pos = tr.positions();
  CHECK(pos.size() == 21);
  CHECK(pos.front() == Site{0, 0});
  CHECK(tr.position_at(20) == tr.final_position());
  CHECK_THROWS_AS(tr.position_at(21), RangeError);
  std::ostringstream out;
  write_transcript_csv(out, tr);
  const std::string text = out.str();
  CHECK(text.rfind("t,letter,accepted,x,y\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 21);
}
