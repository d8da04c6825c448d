#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace exwalk {

inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// 95% Wilson score interval for `successes` out of `n`. n = 0 gives [0, 1].
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kZ95);

/// Running mean/variance (Welford).
class MeanAccumulator {
 public:
  void add(double x);
  void merge(const MeanAccumulator& o);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 for n < 2
  double std_error() const;
  Interval normal_interval(double z = kZ95) const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// z-score of a binomial proportion against a hypothesised p (0 when p is 0 or 1
/// and the estimate agrees exactly).
double binomial_z(std::uint64_t successes, std::uint64_t n, double p);

/// Upper tail P(chi2_dof >= stat).
double chi_square_sf(double stat, double dof);

/// Pearson chi-square statistic and p-value for observed counts vs expected
/// probabilities.
struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                std::span<const double> expected_prob);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov p-value
/// (Stephens' small-sample correction on the effective size).
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

/// Weighted least squares y = intercept + slope * x. With `weights` empty the
/// fit is ordinary least squares. The slope standard error is scaled by the
/// reduced chi-square when it exceeds one (weighted) or uses the residual
/// variance (unweighted); the interval uses Student t with m - 2 dof.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  Interval slope_ci;
  std::size_t points = 0;
};
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys,
                     std::span<const double> weights = {});

double student_t_quantile(double prob, double dof);

/// Exact lower tail P(Bin(n, p) <= k) by direct summation.
double binomial_lower_tail(int n, double p, double k);

/// Monte Carlo estimate of a back-crossing probability with censoring.
struct EnEstimate {
  int n = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  std::uint64_t completions = 0;
  std::uint64_t censored = 0;
  std::optional<double> p_hat;  // empty when every trial censored
  Interval wilson_ci{0.0, 1.0};

  std::uint64_t decided() const { return trials - censored; }
  void finalize();
};

}  // namespace exwalk
