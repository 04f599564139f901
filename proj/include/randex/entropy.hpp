#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace randex {

inline constexpr double kDomainSlack = 1e-12;

// Binary Shannon entropy in bits, with the 0*log(0) = 0 convention.
// Accepts arguments up to 1e-12 outside [0,1] and clamps them; anything
// further out is a genuine domain error.
inline double binary_entropy(double p) {
  if (p < -kDomainSlack || p > 1.0 + kDomainSlack)
    throw std::domain_error("binary_entropy: p outside [0,1]: " + std::to_string(p));
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Entropy of a qubit whose Bloch vector has length |x|, i.e. the binary
// entropy of the eigenvalue (1+x)/2. Even in x and nonincreasing in |x|.
inline double bloch_entropy(double x) {
  if (x < -1.0 - kDomainSlack || x > 1.0 + kDomainSlack)
    throw std::domain_error("bloch_entropy: x outside [-1,1]: " + std::to_string(x));
  double ax = std::fabs(x);
  if (ax >= 1.0) return 0.0;
  return binary_entropy(0.5 + 0.5 * ax);
}

namespace detail {

// Integrand of the series coefficients: ((1-z)/z)^(2k) / (z ln 2) on [1/2, 1].
inline double series_integrand(double z, int k) {
  double r = (1.0 - z) / z;
  return std::pow(r, 2 * k) / (z * std::log(2.0));
}

inline double simpson(double (*f)(double, int), int k, double a, double b) {
  return (b - a) / 6.0 * (f(a, k) + 4.0 * f(0.5 * (a + b), k) + f(b, k));
}

inline double adaptive_simpson(double (*f)(double, int), int k, double a, double b,
                               double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double left = simpson(f, k, a, m);
  double right = simpson(f, k, m, b);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, k, a, m, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, k, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// k-th series coefficient by adaptive quadrature, absolute error <= 1e-12.
inline double entropy_series_integral(int k) {
  if (k < 0) throw std::invalid_argument("entropy_series_integral: negative order");
  double whole = detail::simpson(detail::series_integrand, k, 0.5, 1.0);
  return detail::adaptive_simpson(detail::series_integrand, k, 0.5, 1.0, whole, 1e-13, 48);
}

// Coefficients of the even-power series lower bounds on bloch_entropy.
// integral[k] is the k-th moment of the integrand above (exactly 1 at k=0),
// diff[k] = integral[k-1] - integral[k] > 0 for k >= 1 (diff[0] unused).
struct EntropySeries {
  int order = 0;
  std::vector<double> integral;
  std::vector<double> diff;
};

inline EntropySeries entropy_series(int order) {
  if (order < 1) throw std::invalid_argument("entropy_series: order must be >= 1");
  EntropySeries s;
  s.order = order;
  s.integral.resize(order + 1);
  s.integral[0] = 1.0;  // exact
  for (int k = 1; k <= order; ++k) s.integral[k] = entropy_series_integral(k);
  s.diff.resize(order + 1, 0.0);
  for (int k = 1; k <= order; ++k) s.diff[k] = s.integral[k - 1] - s.integral[k];
  return s;
}

// Truncated series lower bound on bloch_entropy(x):
//   sum_{k<=n} integral[k] * x^(2k) * (1 - x^2).
// Vanishes at x = +-1 and increases toward bloch_entropy as order grows.
inline double bloch_entropy_lower(double x, const EntropySeries& s) {
  if (x < -1.0 - kDomainSlack || x > 1.0 + kDomainSlack)
    throw std::domain_error("bloch_entropy_lower: x outside [-1,1]");
  double x2 = std::min(1.0, x * x);
  double acc = 0.0;
  for (int k = s.order; k >= 0; --k) acc = acc * x2 + s.integral[k];
  return acc * (1.0 - x2);
}

// Polynomial lower bound on the entropy gap bloch_entropy(l) - bloch_entropy(a)
// for |l| <= a:  sum_{k>=1} diff[k] * (a^(2k) - l^(2k)).
// Exactly polynomial in a^2 and l^2, nonnegative, and below the true gap.
inline double entropy_gain_lower(double a, double lambda1, const EntropySeries& s) {
  if (std::fabs(lambda1) > a + kDomainSlack)
    throw std::invalid_argument("entropy_gain_lower: |lambda1| exceeds a");
  double a2 = a * a;
  double l2 = lambda1 * lambda1;
  double pa = 1.0, pl = 1.0, acc = 0.0;
  for (int k = 1; k <= s.order; ++k) {
    pa *= a2;
    pl *= l2;
    acc += s.diff[k] * (pa - pl);
  }
  return acc < 0.0 ? 0.0 : acc;
}

}  // namespace randex
