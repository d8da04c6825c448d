#include <doctest.h>

#include <cmath>
#include <numeric>

#include "exwalk/oracles.hpp"

using namespace exwalk;

namespace {

// E[#{1 <= k <= N : S_k = 0}] = sum over even k of C(k, k/2) 2^-k.
double local_time_series(std::uint64_t N) {
  double term = 1.0, total = 0.0;
  for (std::uint64_t m = 1; 2 * m <= N; ++m) {
    term *= (2.0 * m - 1.0) / (2.0 * m);
    total += term;
  }
  return total;
}

}  // namespace

TEST_CASE("gambler's ruin exact values") {
  CHECK(gambler_exact(1).value() == 1.0);
  CHECK(gambler_exact(2).value() == 0.5);
  CHECK(gambler_exact(10).num == 1);
  CHECK(gambler_exact(10).den == 10);
  CHECK_THROWS_AS(gambler_exact(0), DomainError);
}

TEST_CASE("gambler's ruin simulation") {
  for (std::uint64_t n : {2, 3, 5, 10, 20}) {
    const auto rep = gambler_mc(n, 100000, {n, 0});
    const auto& row = rep.rows.at(0);
    REQUIRE(row.estimate);
    REQUIRE(row.z);
    MESSAGE("n=" << n << " p=" << *row.estimate << " z=" << *row.z);
    const double sd = std::sqrt((1.0 / n) * (1 - 1.0 / n) / 100000);
    CHECK(std::abs(*row.estimate - 1.0 / n) <= 4 * sd);
    CHECK(row.censored == 0);
  }
  const auto one = gambler_mc(1, 10, {0, 0});
  CHECK(*one.rows[0].estimate == 1.0);
}

TEST_CASE("local time exact values") {
  CHECK(local_time_exact(0) == 0.0);
  CHECK(local_time_exact(1) == 0.0);
  CHECK(local_time_exact(2) == doctest::Approx(0.5).epsilon(1e-15));
  for (std::uint64_t N : {3, 10, 100, 10000}) {
    CHECK(local_time_exact(N) == doctest::Approx(local_time_series(N)).epsilon(1e-10));
    CHECK(local_time_exact(N) <= 10.0 * std::sqrt(static_cast<double>(N)));
  }
  CHECK_THROWS_AS(local_time_exact(200001), RangeError);
}

TEST_CASE("local time simulation") {
  const auto zero = local_time_mc(0, 100, {1, 0});
  CHECK(*zero.rows[0].estimate == 0.0);
  for (std::uint64_t N : {2, 10, 100, 10000}) {
    const auto rep = local_time_mc(N, 10000, {N, 1});
    const auto& row = rep.rows.at(0);
    REQUIRE(row.z);
    MESSAGE("N=" << N << " mean=" << *row.estimate << " z=" << *row.z);
    CHECK(std::abs(*row.z) <= 4);
    CHECK(*row.estimate <= 10.0 * std::sqrt(static_cast<double>(N)));
  }
}

TEST_CASE("transition probabilities") {
  const ExplicitFinite grid = grid_graph(3);
  const auto p0 = transition_dp(grid, Site{1, 1}, 0);
  CHECK(p0[grid.box().index_of(Site{1, 1})] == 1.0);
  CHECK(std::accumulate(p0.begin(), p0.end(), 0.0) == 1.0);

  ExplicitFinite one(Box::cube(2, 1));
  one.set_present(Site{0, 0}, kPlusX);
  const auto p1 = transition_dp(one, Site{0, 0}, 1);
  CHECK(p1[one.box().index_of(Site{0, 0})] == doctest::Approx(0.75));
  CHECK(p1[one.box().index_of(Site{1, 0})] == doctest::Approx(0.25));

  for (const auto& g : {grid_graph(4), comb_graph(3, 4), path_graph(9)}) {
    for (auto kind : {WalkKind::Induced, WalkKind::Simple}) {
      const auto all = transition_dp_all(g, g.box().lo(), 60, kind);
      for (const auto& row : all) CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("transition probabilities match simulated walks") {
  const ExplicitFinite g = comb_graph(2, 2);
  const Box& box = g.box();
  constexpr std::uint64_t walks = 1'000'000;
  constexpr std::uint64_t t = 8;
  const auto exact = transition_dp(g, Site{0, 0}, t);
  std::vector<std::uint64_t> hits(box.site_count(), 0);
  for (std::uint64_t i = 0; i < walks; ++i) {
    LetterStream s({77, i}, 2);
    SubgraphOracle o(g);
    WalkState st{Site{0, 0}};
    for (std::uint64_t k = 0; k < t; ++k) induced_step(st, s.next_letter(), o);
    ++hits[box.index_of(st.pos)];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < box.site_count(); ++i) {
    const double p = exact[i];
    if (p == 0.0) {
      CHECK(hits[i] == 0);
      continue;
    }
    const double z = (static_cast<double>(hits[i]) / walks - p) / std::sqrt(p * (1 - p) / walks);
    worst = std::max(worst, std::abs(z));
  }
  MESSAGE("worst per-site z " << worst);
  CHECK(worst <= 4);
}

TEST_CASE("graph specs") {
  CHECK(parse_graph_spec("path:9").box().site_count() == 9);
  CHECK(parse_graph_spec("grid:3").box().site_count() == 9);
  CHECK(parse_graph_spec("comb:2:3").box().site_count() == 20);
  CHECK_THROWS_AS(parse_graph_spec("path:x"), UsageError);
  CHECK_THROWS_AS(parse_graph_spec("ring:4"), UsageError);
  CHECK_THROWS_AS(parse_graph_spec("grid:3:3"), UsageError);
}

TEST_CASE("excursion chain decay") {
  std::vector<EnEstimate> est;
  for (int n = 2; n <= 6; ++n) est.push_back(excursion_chain_En(n, 10000, {static_cast<std::uint64_t>(n), 40}).estimate);
  for (std::size_t i = 0; i + 1 < est.size(); ++i) {
    MESSAGE("n=" << est[i].n << " p=" << *est[i].p_hat);
    CHECK(*est[i + 1].p_hat < *est[i].p_hat);
  }
  CHECK_FALSE(est.front().wilson_ci.overlaps(est.back().wilson_ci));
  const auto fit = decay_fit(est);
  MESSAGE("slope " << fit.slope << " [" << fit.slope_ci.lo << ", " << fit.slope_ci.hi << "]");
  CHECK(fit.slope < 0);
  CHECK(fit.slope_ci.hi < 0);
}

TEST_CASE("positive excursions are not rare") {
  const auto r = excursion_chain_En(4, 10000, {1, 41});
  const double freq = static_cast<double>(r.positive) / static_cast<double>(r.excursions);
  CHECK(freq >= std::pow(2.0, -4) / 100.0);
  CHECK(r.positive + r.negative + r.estimate.censored == r.estimate.trials);
}

TEST_CASE("teleporting chain") {
  const auto empty = teleport_F1F2(3, 0, {1, 0});
  CHECK(empty.trials == 0);
  CHECK(empty.f1_fail == 0);
  CHECK_THROWS_AS(teleport_F1F2(9, 1, {1, 0}), DomainError);

  for (int n : {2, 3}) {
    const auto tp = teleport_F1F2(n, 10000, {static_cast<std::uint64_t>(n), 50});
    const auto en = excursion_chain_En(n, 10000, {static_cast<std::uint64_t>(n), 51}).estimate;
    CHECK(tp.excursions_per_trial == static_cast<std::uint64_t>(std::pow(3, n)));
    CHECK(en.wilson_ci.lo <= tp.f1_ci.hi + tp.f2_ci.hi);
  }
  double prev = 1.0;
  for (int n = 2; n <= 5; ++n) {
    const auto tp = teleport_F1F2(n, 10000, {static_cast<std::uint64_t>(n), 52});
    const double f1 = static_cast<double>(tp.f1_fail) / 10000.0;
    MESSAGE("n=" << n << " F1c=" << f1);
    CHECK(f1 < prev);
    prev = f1;
  }
}

TEST_CASE("decay fit on exact geometric data") {
  std::vector<double> xs, ys;
  for (int n = 1; n <= 8; ++n) {
    xs.push_back(n);
    ys.push_back(std::pow(0.4, n));
  }
  CHECK(std::abs(decay_fit(xs, ys).slope - std::log(0.4)) <= 1e-9);

  std::vector<EnEstimate> est;
  for (int n = 1; n <= 6; ++n) {
    EnEstimate e;
    e.n = n;
    e.trials = 1000;
    e.p_hat = 3.0 * std::pow(0.7, n);
    e.wilson_ci = {*e.p_hat * 0.9, *e.p_hat * (1.1 + 0.01 * n)};
    est.push_back(e);
  }
  const auto f = decay_fit(est);
  CHECK(std::abs(f.slope - std::log(0.7)) <= 1e-9);
  CHECK(std::abs(f.intercept - std::log(3.0)) <= 1e-9);

  CHECK_THROWS_AS(decay_fit(std::vector<EnEstimate>{est[0]}), InsufficientPoints);
  CHECK_THROWS_AS(decay_fit(std::vector<double>{1, 2}, std::vector<double>{0.5, 0.25}), InsufficientPoints);
}

TEST_CASE("escape exponent") {
  WalkTranscript ballistic(Site{0, 0}, {0, 0});
  for (int i = 0; i < 5000; ++i) ballistic.push(kPlusX, true);
  const auto b = escape_exponent(ballistic);
  CHECK(std::abs(b.alpha - 1.0) <= 1e-6);

  WalkTranscript still(Site{0, 0}, {0, 0});
  for (int i = 0; i < 2000; ++i) still.push(kPlusX, false);
  const auto s = escape_exponent(still);
  CHECK(s.degenerate);
  CHECK(s.alpha == 0.0);

  WalkTranscript tiny(Site{0, 0}, {0, 0});
  tiny.push(kPlusX, true);
  CHECK_THROWS_AS(escape_exponent(tiny), DomainError);

  MeanAccumulator acc;
  SubgraphOracle full(FullLattice{2});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    LetterStream st({seed, 60}, 2);
    acc.add(escape_exponent(run_induced(st, full, 1'000'000)).alpha);
  }
  MESSAGE("free walk alpha " << acc.mean());
  CHECK(std::abs(acc.mean() - 0.5) <= 0.05);
}
