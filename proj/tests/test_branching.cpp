#include <doctest.h>

#include <cmath>
#include <vector>

#include "exwalk/branching.hpp"
#include "exwalk/induced_walk.hpp"
#include "exwalk/oracles.hpp"
#include "exwalk/stats.hpp"

using namespace exwalk;

TEST_CASE("offspring laws") {
  const auto r = OffspringLaw::reduced(0.25);
  CHECK(r.probs() == std::vector<double>{0.75, 0.25});
  CHECK(r.mean_extra() == doctest::Approx(0.25));
  CHECK(r.sample(0.5) == 0);
  CHECK(r.sample(0.8) == 1);
  CHECK(OffspringLaw::reduced(0.0).trivial());
  CHECK_THROWS_AS(OffspringLaw::reduced(1.5), DomainError);
  CHECK_THROWS_AS(OffspringLaw({0.5, 0.4}), DomainError);
  const OffspringLaw g({0.5, 0.25, 0.25});
  CHECK(g.mean_extra() == doctest::Approx(0.75));
  CHECK(g.sample(0.9) == 2);
}

TEST_CASE("without branching the tree is the induced walk") {
  SubgraphOracle full(FullLattice{2});
  const auto tree = run_branching({21, 0}, 2, OffspringLaw::reduced(0.0), 5000, 100, full);
  REQUIRE(tree.particles.size() == 1);
  LetterStream s({21, 0}, 2);
  const auto tr = run_induced(s, full, 5000);
  CHECK(tree.final_positions[0] == tr.final_position());
  REQUIRE(tree.moves[0].size() == 5000);
  for (std::size_t i = 0; i < 5000; ++i) REQUIRE((tree.moves[0][i] & 0x7f) == tr.letter_index(i));
}

TEST_CASE("branching trees are reproducible and populations never shrink") {
  SubgraphOracle full(FullLattice{2});
  const auto law = OffspringLaw::reduced(0.5);
  const auto a = run_branching({3, 3}, 2, law, 15, 100000, full);
  const auto b = run_branching({3, 3}, 2, law, 15, 100000, full);
  CHECK(a.final_positions == b.final_positions);
  CHECK(a.population == b.population);
  CHECK(a.moves == b.moves);
  for (std::size_t j = 1; j < a.population.size(); ++j) CHECK(a.population[j] >= a.population[j - 1]);
  CHECK(a.population.back() == a.particles.size());
  for (const auto& p : a.particles) {
    if (p.id == 0) continue;
    CHECK(p.parent >= 0);
    CHECK(static_cast<std::uint32_t>(p.parent) < p.id);
    CHECK(a.particles[static_cast<std::size_t>(p.parent)].birth_time <= p.birth_time);
    CHECK(a.moves[p.id].size() == 15 - p.birth_time + 1);
  }
}

TEST_CASE("isolated origin holds every particle") {
  ExplicitFinite none(Box::cube(2, 1));
  SubgraphOracle o(none);
  const auto tree = run_branching({5, 0}, 2, OffspringLaw::reduced(0.5), 12, 100000, o);
  for (const auto& p : tree.final_positions) CHECK(p == Site{0, 0});
  CHECK(tree.population.back() > 1);
}

TEST_CASE("particle cap suppresses births") {
  SubgraphOracle full(FullLattice{2});
  const auto tree = run_branching({5, 0}, 2, OffspringLaw::reduced(1.0), 10, 50, full);
  CHECK(tree.truncated);
  CHECK(tree.population.back() == 50);
  CHECK_THROWS_AS(run_branching({5, 0}, 3, OffspringLaw::reduced(1.0), 10, 50, full), DimensionMismatch);
}

TEST_CASE("population increments are binomial") {
  // pooled increments N_{j+1} - N_j given N_j = m, for small m
  const auto law = OffspringLaw::reduced(0.3);
  std::vector<std::uint64_t> obs(4, 0);
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const auto tr = gw_population(6, law, {s, 9});
    for (std::size_t j = 0; j + 1 < tr.n.size(); ++j) {
      if (tr.n[j] == 3) ++obs[tr.n[j + 1] - 3];
    }
  }
  const std::vector<double> p{0.343, 0.441, 0.189, 0.027};
  const auto chi = chi_square_test(obs, p);
  MESSAGE("increment chi-square p " << chi.p_value);
  CHECK(chi.p_value > 1e-4);
}

TEST_CASE("galton-watson means") {
  const auto flat = gw_population(20, OffspringLaw::reduced(0.0), {1, 0});
  CHECK(flat.n == std::vector<std::uint64_t>(21, 1));

  MeanAccumulator m;
  for (std::uint64_t s = 0; s < 100000; ++s) m.add(static_cast<double>(gw_population(2, OffspringLaw::reduced(0.5), {s, 1}).n[2]));
  CHECK(std::abs(m.mean() - 2.25) <= 3 * m.std_error());

  // independent trajectories for every j, so the points of the fit are independent
  std::vector<double> js, means, weights;
  const auto law = OffspringLaw::reduced(0.5);
  for (int j = 0; j <= 30; ++j) {
    MeanAccumulator a;
    for (std::uint64_t s = 0; s < 400; ++s) {
      const auto tr = gw_population(j, law, {s, 100 + static_cast<std::uint64_t>(j)});
      REQUIRE_FALSE(tr.capped);
      a.add(static_cast<double>(tr.n.back()) / std::pow(1.5, j));
    }
    js.push_back(j);
    means.push_back(a.mean());
    weights.push_back(a.std_error() > 0 ? 1.0 / (a.std_error() * a.std_error()) : 1e12);
  }
  const auto fit = linear_fit(js, means, weights);
  MESSAGE("martingale slope " << fit.slope << " ci " << fit.slope_ci.lo << " " << fit.slope_ci.hi);
  CHECK(fit.slope_ci.contains(0.0));
}

TEST_CASE("galton-watson cap") {
  const auto tr = gw_population(40, OffspringLaw::reduced(1.0), {1, 0}, 1000);
  CHECK(tr.capped);
  CHECK(tr.n.back() <= 1000);
}

TEST_CASE("recurrence certificates") {
  const auto law = OffspringLaw::reduced(0.5);
  ExplicitFinite none(Box::cube(2, 1));
  SubgraphOracle o(none);
  const auto tree = run_branching({1, 0}, 2, law, 5, 1000, o);
  const auto c = recurrence_certificate(tree, o, 1, 5);
  CHECK(c.certified);
  CHECK(c.reachable == 1);
  CHECK(c.witness == 0u);
  CHECK(c.cover_time == 1u);

  // pigeonhole: one particle cannot make 3 visits to each of 2 sites in 5 steps
  ExplicitFinite pair(Box::cube(2, 1));
  pair.set_present(Site{0, 0}, kPlusX);
  SubgraphOracle po(pair);
  const auto small = run_branching({2, 0}, 2, law, 5, 1000, po);
  CHECK_FALSE(recurrence_certificate(small, po, 3, 5).certified);
}

TEST_CASE("two-site component is almost always certified") {
  ExplicitFinite pair(Box::cube(2, 1));
  pair.set_present(Site{0, 0}, kPlusX);
  SubgraphOracle po(pair);
  const auto law = OffspringLaw::reduced(0.5);
  int ok = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    if (certify_streaming(pair, {s, 0}, law, 1000, 3, 100000).certified) ++ok;
  }
  CHECK(ok >= 990);
}

TEST_CASE("streaming certificates match the recorded tree") {
  const auto law = OffspringLaw::reduced(0.5);
  for (std::uint64_t mask : {0ull, 1ull, 7ull, 0x5a5ull, 0xfffull, 0x933ull}) {
    const ExplicitFinite g = box_subgraph(1, mask);
    SubgraphOracle o(g);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto tree = run_branching({s, mask}, 2, law, 18, 100000, o);
      const auto a = recurrence_certificate(tree, o, 2, 18);
      const auto b = certify_streaming(g, {s, mask}, law, 18, 2, 100000);
      CHECK(a.certified == b.certified);
      CHECK(a.witness == b.witness);
      CHECK(a.cover_time == b.cover_time);
      CHECK(a.reachable == b.reachable);
    }
  }
}

TEST_CASE("tiny box subgraphs") {
  CHECK(ExplicitFinite(Box::cube(2, 1)).box_edges().size() == 12);
  CHECK_THROWS_AS(box_subgraph(1, 1u << 12), RangeError);
  const auto law = OffspringLaw::reduced(0.5);
  const auto empty = certify_streaming(box_subgraph(1, 0), {0, 0}, law, 10000, 3, 100000);
  CHECK(empty.certified);
  CHECK(empty.reachable == 1);
  const auto full = certify_streaming(box_subgraph(1, 0xfff), {0, 0xfff}, law, 10000, 3, 100000);
  CHECK(full.certified);
  CHECK(full.reachable == 9);
}

TEST_CASE("carne bound examples") {
  const ExplicitFinite two = path_graph(2);
  const double b = carne_bound(two, Site{0, 0}, Site{1, 0}, 1);
  CHECK(b == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-12));
  const auto p = transition_dp(two, Site{0, 0}, 1, WalkKind::Simple);
  CHECK(p[1] == doctest::Approx(1.0));
  CHECK(p[1] <= b);
  CHECK(carne_bound(path_graph(9), Site{3, 0}, Site{3, 0}, 7) == doctest::Approx(2.0));
  ExplicitFinite split(Box(Site{0, 0}, Site{3, 0}));
  split.set_present(Site{0, 0}, kPlusX);
  split.set_present(Site{2, 0}, kPlusX);
  CHECK_THROWS_AS(carne_bound(split, Site{0, 0}, Site{3, 0}, 4), DisconnectedPair);
}

TEST_CASE("carne bound holds on the nine-site path") {
  const ExplicitFinite g = path_graph(9);
  std::uint64_t violations = 0;
  for (int x = 0; x < 9; ++x) {
    const auto dp = transition_dp_all(g, Site{x, 0}, 50, WalkKind::Simple);
    for (int y = 0; y < 9; ++y) {
      for (std::uint64_t t = 1; t <= 50; ++t) {
        if (dp[t][static_cast<std::size_t>(y)] > carne_bound(g, Site{x, 0}, Site{y, 0}, t)) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("displacement tails") {
  SubgraphOracle full(FullLattice{2});
  const auto one = displacement_tail_check(full, 1.0, 50, 2000, {1, 0});
  CHECK(one.exceed == 0);
  const auto half = displacement_tail_check(full, 0.5, 200, 20000, {2, 0});
  CHECK(half.empirical <= half.bound);
  SubgraphOracle comb(comb_graph(200, 200));
  const auto c = displacement_tail_check(comb, 0.5, 200, 20000, {3, 0});
  CHECK(c.empirical <= c.bound);
  CHECK(displacement_tail_check(comb, 1.0, 200, 2000, {4, 0}).exceed == 0);
}

TEST_CASE("chernoff bound") {
  CHECK(chernoff_bound(100, 0.5, 0.2) == doctest::Approx(0.36787944117144233).epsilon(1e-12));
  CHECK(binomial_lower_tail(20, 0.5, 20 * 0.5 * 0.8) <= chernoff_bound(20, 0.5, 0.2));
  CHECK(chernoff_bound(30, 0.5, 1e-9) == doctest::Approx(1.0));
  CHECK_THROWS_AS(chernoff_bound(10, 0.0, 0.5), DomainError);
}
