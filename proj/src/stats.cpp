#include "exwalk/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "exwalk/errors.hpp"

namespace exwalk {

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  const double lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

void MeanAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  mean_ += delta * nb / (na + nb);
  m2_ += o.m2_ + delta * delta * na * nb / (na + nb);
  n_ += o.n_;
}

double MeanAccumulator::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double MeanAccumulator::std_error() const {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

Interval MeanAccumulator::normal_interval(double z) const {
  const double h = z * std_error();
  return {mean_ - h, mean_ + h};
}

double binomial_z(std::uint64_t successes, std::uint64_t n, double p) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double sigma = std::sqrt(p * (1.0 - p) / nn);
  const double diff = static_cast<double>(successes) / nn - p;
  if (sigma == 0.0) return diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff);
  return diff / sigma;
}

double chi_square_sf(double stat, double dof) {
  if (stat <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> expected_prob) {
  if (observed.size() != expected_prob.size() || observed.size() < 2) {
    throw DomainError("chi-square test needs matching bins (at least two)");
  }
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = total * expected_prob[i];
    if (e <= 0.0) throw DomainError("chi-square bin with zero expectation");
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
  }
  r.dof = static_cast<double>(observed.size() - 1);
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double kolmogorov_sf(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.0) {
    // Complementary form converges faster for small lambda.
    const double pi = 3.14159265358979323846;
    const double x = -pi * pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 99; k += 2) sum += std::exp(x * k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

double student_t_quantile(double prob, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, prob);
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys,
                     std::span<const double> weights) {
  const std::size_t m = xs.size();
  if (m != ys.size() || (!weights.empty() && weights.size() != m)) {
    throw DomainError("linear fit inputs differ in length");
  }
  if (m < 2) throw InsufficientPoints("linear fit needs at least two points");
  const bool weighted = !weights.empty();
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = weighted ? weights[i] : 1.0;
    sw += w;
    sx += w * xs[i];
    sy += w * ys[i];
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = weighted ? weights[i] : 1.0;
    sxx += w * (xs[i] - xbar) * (xs[i] - xbar);
    sxy += w * (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx <= 0.0) throw DomainError("linear fit needs at least two distinct x values");
  LinearFit fit;
  fit.points = m;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  if (m > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = weighted ? weights[i] : 1.0;
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      rss += w * r * r;
    }
    const double reduced = rss / static_cast<double>(m - 2);
    const double scale = weighted ? std::max(1.0, reduced) : reduced;
    fit.slope_se = std::sqrt(scale / sxx);
    const double t = student_t_quantile(0.975, static_cast<double>(m - 2));
    fit.slope_ci = {fit.slope - t * fit.slope_se, fit.slope + t * fit.slope_se};
  } else {
    fit.slope_se = weighted ? std::sqrt(1.0 / sxx) : INFINITY;
    fit.slope_ci = {fit.slope - kZ95 * fit.slope_se, fit.slope + kZ95 * fit.slope_se};
  }
  return fit;
}

double binomial_lower_tail(int n, double p, double k) {
  if (n < 0) throw DomainError("binomial with negative n");
  // A threshold within rounding noise of an integer keeps that integer, so the
  // tail is never understated.
  const double kk = k + 1e-9;
  if (kk < 0) return 0.0;
  double total = 0.0;
  if (n <= 60) {
    std::uint64_t choose = 1;  // C(n, i), exact for n <= 60
    for (int i = 0; i <= n && i <= kk; ++i) {
      if (i > 0) choose = choose * static_cast<std::uint64_t>(n - i + 1) / static_cast<std::uint64_t>(i);
      total += static_cast<double>(choose) * std::pow(p, i) * std::pow(1.0 - p, n - i);
    }
  } else {
    const double lp = std::log(p), lq = std::log1p(-p);
    for (int i = 0; i <= n && i <= kk; ++i) {
      const double lchoose =
          std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
      total += std::exp(lchoose + i * lp + (n - i) * lq);
    }
  }
  return std::min(total, 1.0);
}

void EnEstimate::finalize() {
  const auto dec = decided();
  if (dec == 0) {
    p_hat.reset();
    wilson_ci = {0.0, 1.0};
  } else {
    p_hat = static_cast<double>(hits) / static_cast<double>(dec);
    wilson_ci = wilson_interval(hits, dec);
  }
}

}  // namespace exwalk
