#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "randex/entropy.hpp"
#include "randex/rng.hpp"

namespace randex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest score any strategy can reach at a given ground-state overlap.
inline double quantum_max_score(double theta) {
  if (theta < -kDomainSlack || theta > 1.0 + kDomainSlack)
    throw std::domain_error("quantum_max_score: theta outside [0,1]");
  theta = std::clamp(theta, 0.0, 1.0);
  return 0.5 + std::sqrt(theta * (1.0 - theta));
}

// Score reachable by classical mixing at a given overlap; below this line the
// round entropy is zero.
inline double classical_boundary(double theta) {
  if (theta < 0.5 - kDomainSlack || theta > 1.0 + kDomainSlack)
    throw std::domain_error("classical_boundary: theta outside [1/2,1]");
  return 0.5 * (3.0 - 2.0 * theta);
}

// Variables of the reduced single-round problem. Per input x: a block weight
// eta_x, a Bloch radius a_tilde_x <= eta_x, and the angle xi_x between the
// state and the measurement axis. phi_angle survives from the form where the
// testing axis is free; the solver works on the eliminated form and leaves
// it at zero.
struct QubitStrategy {
  std::array<double, 2> eta{0.0, 0.0};
  std::array<double, 2> a_tilde{0.0, 0.0};
  std::array<double, 2> xi{0.0, 0.0};
  double phi_angle = 0.0;

  void validate() const {
    for (int x = 0; x < 2; ++x) {
      if (a_tilde[x] < -kDomainSlack || a_tilde[x] > eta[x] + kDomainSlack || eta[x] > 1.0 + kDomainSlack)
        throw std::invalid_argument("QubitStrategy: need 0 <= a_tilde <= eta <= 1");
    }
  }
};

// Left-hand sides of the two nontrivial constraints:
//   first  = sum_x (-eta_x + (-1)^x a_x cos xi_x),  feasible when >= 4w - 4
//   second = (sum_x a_x cos xi_x)^2 + (sum_x a_x sin xi_x)^2,
//            feasible when >= (4theta - sum eta)^2 (vacuous if that is < 0)
inline std::pair<double, double> strategy_scores(const QubitStrategy& s) {
  s.validate();
  double score_lhs = 0.0, c_sum = 0.0, s_sum = 0.0;
  for (int x = 0; x < 2; ++x) {
    double c = s.a_tilde[x] * std::cos(s.xi[x]);
    double sn = s.a_tilde[x] * std::sin(s.xi[x]);
    score_lhs += -s.eta[x] + (x == 0 ? c : -c);
    c_sum += c;
    s_sum += sn;
  }
  return {score_lhs, c_sum * c_sum + s_sum * s_sum};
}

inline bool strategy_feasible(const QubitStrategy& s, double omega, double theta,
                              double slack = 1e-9) {
  auto [score_lhs, overlap_lhs] = strategy_scores(s);
  if (score_lhs < 4.0 * omega - 4.0 - slack) return false;
  double t = 4.0 * theta - (s.eta[0] + s.eta[1]);
  if (t <= 0.0) return true;
  return overlap_lhs >= t * t - slack;
}

// Objective of the reduced problem for a concrete strategy. With exact=true
// uses the transcendental entropies, otherwise the polynomial lower bound of
// the given series (which must then be non-null).
inline double strategy_entropy(const QubitStrategy& s, double p0, bool exact,
                               const EntropySeries* series = nullptr) {
  s.validate();
  if (!exact && series == nullptr)
    throw std::invalid_argument("strategy_entropy: series required for polynomial mode");
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    double px = (x == 0) ? p0 : 1.0 - p0;
    double a = std::clamp(s.a_tilde[x], 0.0, 1.0);
    double l = a * std::cos(s.xi[x]);
    total += px * (exact ? bloch_entropy(l) - bloch_entropy(a)
                         : entropy_gain_lower(a, std::clamp(l, -a, a), *series));
  }
  return total < 0.0 ? 0.0 : total;
}

struct RateQuery {
  double omega = 0.5;
  double theta = 0.5;
  double p0 = 0.5;

  void validate() const {
    if (omega < -kDomainSlack || omega > 1.0 + kDomainSlack)
      throw std::domain_error("RateQuery: omega outside [0,1]");
    if (theta < -kDomainSlack || theta > 1.0 + kDomainSlack)
      throw std::domain_error("RateQuery: theta outside [0,1]");
    if (!(p0 > 0.0) || !(p0 < 1.0))
      throw std::domain_error("RateQuery: p0 outside (0,1)");
  }
  // The objective is symmetric under relabelling the input, so biases p and
  // 1-p describe the same problem.
  double p0_canonical() const { return std::min(p0, 1.0 - p0); }
};

enum class BoundMode { certified, heuristic };

struct BoundOptions {
  BoundMode mode = BoundMode::certified;
  double tol = 1e-3;          // target gap in bits
  bool exact_objective = true;
  int order = 8;              // series order when exact_objective is false
  long box_budget = 4'000'000;
  int starts = 64;            // multistart count for the heuristic
  std::uint64_t seed = 0x5eed1e5545ULL;
};

struct BoundResult {
  double certified_lower = 0.0;
  double witness_value = kInf;
  QubitStrategy witness;
  bool has_witness = false;
  bool infeasible = false;  // proven: no strategy attains (omega, theta)
  bool converged = true;
  long boxes_explored = 0;
  double tolerance = 0.0;
};

// Zero-entropy witness on the classically reachable region omega+theta <= 3/2:
// both states aligned with the measurement axis, radii tuned to meet both
// constraints.
inline std::optional<QubitStrategy> mixing_zero_witness(double omega, double theta) {
  if (omega + theta > 1.5 + 1e-12) return std::nullopt;
  QubitStrategy s;
  s.eta = {1.0, 1.0};
  if (omega <= 0.75) {
    double r = std::clamp(std::max(0.0, 4.0 * theta - 3.0), 0.0, std::min(1.0, 3.0 - 4.0 * omega));
    s.a_tilde = {1.0, r};
    s.xi = {0.0, 0.0};
  } else {
    double r = std::clamp(std::max(0.0, 4.0 * omega - 3.0), 0.0, std::min(1.0, 3.0 - 4.0 * theta));
    s.a_tilde = {1.0, r};
    s.xi = {0.0, M_PI};
  }
  return s;
}

// Pure symmetric strategy meeting both constraints whenever the query is
// quantum-achievable; used as a guaranteed-feasible anchor.
inline std::optional<QubitStrategy> boundary_witness(double omega, double theta) {
  if (omega < 0.5 || theta < 0.5) return std::nullopt;
  if (omega > quantum_max_score(theta) + 1e-12) return std::nullopt;
  double c = std::clamp(2.0 * omega - 1.0, 0.0, 1.0);
  double x0 = std::acos(c);
  QubitStrategy s;
  s.eta = {1.0, 1.0};
  s.a_tilde = {1.0, 1.0};
  s.xi = {x0, M_PI - x0};
  return s;
}

namespace detail_bb {

// Search coordinates after eliminating the block weights: per input x the
// measurement-axis component l_x = a_x cos xi_x and the orthogonal component
// m_x = a_x sin xi_x >= 0 (the overlap constraint is easiest to satisfy with
// both orthogonal parts positive, so nonnegative m is no loss). The radius
// a_x = sqrt(l_x^2 + m_x^2) is derived, and a block-weight sum works iff
//   max(a_0 + a_1, 4 theta - sqrt(LHS)) <= min(2, 4 - 4 omega + l_0 - l_1)
// with LHS = (l_0 + l_1)^2 + (m_0 + m_1)^2.
struct Box {
  std::array<double, 4> lo, hi;  // l0, l1, m0, m1
  double lb = 0.0;
};

struct Ctx {
  double fourw4 = 0.0;  // 4 omega - 4
  double theta4 = 0.0;  // 4 theta
  double p0 = 0.5, p1 = 0.5;
  bool exact = true;
  const EntropySeries* series = nullptr;

  double gain(double a, double l) const {
    if (exact) return bloch_entropy(l) - bloch_entropy(a);
    return entropy_gain_lower(a, std::clamp(l, -a, a), *series);
  }
};

struct Ranges {
  double llo[2], lhi[2];
  double labs_min[2], labs_max[2];
  double mlo[2], mhi[2];
  double amin[2], amax[2];
  bool ok = false;
};

inline Ranges analyze(Box& b, const Ctx& c) {
  Ranges r;
  for (int x = 0; x < 2; ++x) {
    r.llo[x] = b.lo[x];
    r.lhi[x] = b.hi[x];
    r.mlo[x] = b.lo[2 + x];
    r.mhi[x] = b.hi[2 + x];
  }
  auto refresh = [&](int x) {
    if (r.llo[x] > r.lhi[x] + 1e-15) return false;
    r.labs_min[x] = (r.llo[x] <= 0.0 && r.lhi[x] >= 0.0)
                        ? 0.0
                        : std::min(std::fabs(r.llo[x]), std::fabs(r.lhi[x]));
    r.labs_max[x] = std::max(std::fabs(r.llo[x]), std::fabs(r.lhi[x]));
    r.amin[x] = std::sqrt(r.labs_min[x] * r.labs_min[x] + r.mlo[x] * r.mlo[x]);
    r.amax[x] = std::min(1.0, std::sqrt(r.labs_max[x] * r.labs_max[x] + r.mhi[x] * r.mhi[x]));
    return r.amin[x] <= 1.0 + 1e-12;
  };
  if (!refresh(0) || !refresh(1)) return r;

  for (int pass = 0; pass < 2; ++pass) {
    // score constraint: l0 - l1 >= a0 + a1 + 4 omega - 4
    double need = r.amin[0] + r.amin[1] + c.fourw4;
    r.llo[0] = std::max(r.llo[0], need + r.llo[1]);
    r.lhi[1] = std::min(r.lhi[1], r.lhi[0] - need);
    if (!refresh(0) || !refresh(1)) return r;

    // overlap constraint: the orthogonal components must jointly reach
    // sqrt(max(0, (4 theta - s_max)^2 - (l0+l1)^2))
    double s_a_hi = std::min(2.0, -c.fourw4 + r.lhi[0] - r.llo[1]);
    double need_b = c.theta4 - s_a_hi;
    if (need_b > 0.0) {
      double sl_lo = r.llo[0] + r.llo[1], sl_hi = r.lhi[0] + r.lhi[1];
      double slsq = std::max(sl_lo * sl_lo, sl_hi * sl_hi);
      double m_need = need_b * need_b - slsq;
      if (m_need > 0.0) {
        m_need = std::sqrt(m_need);
        r.mlo[0] = std::max(r.mlo[0], m_need - r.mhi[1]);
        r.mlo[1] = std::max(r.mlo[1], m_need - r.mhi[0]);
        if (r.mlo[0] > r.mhi[0] + 1e-15 || r.mlo[1] > r.mhi[1] + 1e-15) return r;
        if (!refresh(0) || !refresh(1)) return r;
      }
    }
  }
  b.lo[0] = r.llo[0];
  b.hi[1] = r.lhi[1];
  b.lo[2] = r.mlo[0];
  b.lo[3] = r.mlo[1];

  r.ok = true;
  return r;
}

// Feasibility of the eliminated block-weight window somewhere in the box.
inline bool weight_window_possible(const Ranges& r, const Ctx& c) {
  double s_a_hi = 4.0 - c.fourw4 - 4.0 + r.lhi[0] - r.llo[1];  // 4 - 4w + l0 - l1, maximized
  s_a_hi = std::min(2.0, -c.fourw4 + r.lhi[0] - r.llo[1]);
  if (r.amin[0] + r.amin[1] > s_a_hi + 1e-12) return false;
  double sl_lo = r.llo[0] + r.llo[1], sl_hi = r.lhi[0] + r.lhi[1];
  double slsq = std::max(sl_lo * sl_lo, sl_hi * sl_hi);
  double sm = r.mhi[0] + r.mhi[1];
  double cap = (r.amax[0] + r.amax[1]) * (r.amax[0] + r.amax[1]);
  double lhs = std::min(cap, slsq + sm * sm);
  return c.theta4 - std::sqrt(lhs) <= s_a_hi + 1e-12;
}

// The per-input entropy gap Phi(l) - Phi(sqrt(l^2 + m^2)) is nondecreasing in
// |l| (because |Phi'(z)|/z is nondecreasing) and in m, so its exact minimum
// over a box sits at the low corner. Cross-input coupling is all that remains
// relaxed here.
inline double objective_lb(const Ranges& r, const Ctx& c) {
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    double lam = r.labs_min[x];
    double am = std::min(1.0, std::sqrt(lam * lam + r.mlo[x] * r.mlo[x]));
    double px = (x == 0) ? c.p0 : c.p1;
    double t;
    if (c.exact) {
      t = bloch_entropy(lam) - bloch_entropy(am);
    } else {
      double a2 = am * am, l2 = lam * lam, pa = 1.0, pl = 1.0;
      t = 0.0;
      for (int k = 1; k <= c.series->order; ++k) {
        pa *= a2;
        pl *= l2;
        t += c.series->diff[k] * std::max(0.0, pa - pl);
      }
    }
    total += px * std::max(0.0, t);
  }
  return total;
}

// Split a feasible weight sum into the two block weights.
inline bool split_weights(double a0, double a1, double s_lo, double s_hi, double e[2]) {
  double s = std::clamp(std::max(a0 + a1, s_lo), a0 + a1, s_hi);
  if (s > s_hi + 1e-12 || s > 2.0 + 1e-12) return false;
  e[0] = std::max(a0, s - 1.0);
  e[1] = s - e[0];
  return e[0] <= 1.0 + 1e-12 && e[1] >= a1 - 1e-12 && e[1] <= 1.0 + 1e-12;
}

// Build a full strategy from the reduced point, if feasible; objective value
// is returned through `value` on success.
inline bool lift_point(const double l[2], const double m[2], const Ctx& c,
                       QubitStrategy& out, double& value) {
  double a[2];
  for (int x = 0; x < 2; ++x) {
    a[x] = std::sqrt(l[x] * l[x] + m[x] * m[x]);
    if (a[x] > 1.0 + 1e-12) return false;
  }
  double s_a = std::min(2.0, -c.fourw4 + l[0] - l[1]);
  double lhs = (l[0] + l[1]) * (l[0] + l[1]) + (m[0] + m[1]) * (m[0] + m[1]);
  double s_b = c.theta4 - std::sqrt(lhs);
  double e[2];
  if (std::max(a[0] + a[1], s_b) > s_a + 1e-12) return false;
  if (!split_weights(a[0], a[1], s_b, s_a, e)) return false;
  for (int x = 0; x < 2; ++x) {
    out.eta[x] = std::clamp(e[x], 0.0, 1.0);
    out.a_tilde[x] = std::min(a[x], out.eta[x]);
    out.xi[x] = std::atan2(m[x], l[x]);
  }
  out.phi_angle = 0.0;
  value = c.p0 * c.gain(a[0], l[0]) + c.p1 * c.gain(a[1], l[1]);
  if (value < 0.0) value = 0.0;
  return true;
}

inline bool lex_less(const QubitStrategy& a, const QubitStrategy& b) {
  auto key = [](const QubitStrategy& s) {
    return std::array<double, 6>{s.eta[0], s.eta[1], s.a_tilde[0],
                                 s.a_tilde[1], s.xi[0], s.xi[1]};
  };
  return key(a) < key(b);
}

// Compact Nelder-Mead over the reduced 4-cube.
template <typename F>
std::pair<double, std::array<double, 4>> nelder_mead4(const F& f, std::array<double, 4> start,
                                                      int iters) {
  constexpr int n = 4;
  std::array<std::array<double, 4>, n + 1> pts;
  std::array<double, n + 1> val;
  pts.fill(start);
  for (int i = 0; i < n; ++i) pts[i + 1][i] += (pts[i + 1][i] > 0.0 ? -0.22 : 0.22);
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i]);
  for (int it = 0; it < iters; ++it) {
    int best = 0, worst = 0, second = 0;
    for (int i = 1; i <= n; ++i) {
      if (val[i] < val[best]) best = i;
      if (val[i] > val[worst]) worst = i;
    }
    for (int i = 0; i <= n; ++i)
      if (i != worst && (second == worst || val[i] > val[second])) second = i;
    if (second == worst) second = best;
    std::array<double, 4> centroid{};
    for (int i = 0; i <= n; ++i)
      if (i != worst)
        for (int d = 0; d < n; ++d) centroid[d] += pts[i][d] / n;
    auto blend = [&](double alpha) {
      std::array<double, 4> p;
      for (int d = 0; d < n; ++d) p[d] = centroid[d] + alpha * (centroid[d] - pts[worst][d]);
      return p;
    };
    auto refl = blend(1.0);
    double fr = f(refl);
    if (fr < val[best]) {
      auto ex = blend(2.0);
      double fe = f(ex);
      if (fe < fr) { pts[worst] = ex; val[worst] = fe; }
      else { pts[worst] = refl; val[worst] = fr; }
    } else if (fr < val[second]) {
      pts[worst] = refl;
      val[worst] = fr;
    } else {
      auto con = blend(-0.5);
      double fc = f(con);
      if (fc < val[worst]) { pts[worst] = con; val[worst] = fc; }
      else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (int d = 0; d < n; ++d) pts[i][d] = 0.5 * (pts[i][d] + pts[best][d]);
          val[i] = f(pts[i]);
        }
      }
    }
  }
  int arg = 0;
  for (int i = 1; i <= n; ++i)
    if (val[i] < val[arg]) arg = i;
  return {val[arg], pts[arg]};
}

}  // namespace detail_bb

// Certified lower bound (and heuristic witness) for the reduced single-round
// entropy problem at a query point. Certification is an interval
// branch-and-bound over the reduced box; the witness search is a quasi-random
// multistart with a penalized local solver.
inline BoundResult round_entropy_bound(const RateQuery& q, const BoundOptions& opt = {}) {
  using namespace detail_bb;
  q.validate();
  if (!(opt.tol > 0.0)) throw std::invalid_argument("round_entropy_bound: tol must be positive");
  if (opt.order < 1) throw std::invalid_argument("round_entropy_bound: order must be >= 1");

  BoundResult res;
  res.tolerance = opt.tol;

  // Classically reachable region: zero bits, witnessed explicitly.
  if (auto w = mixing_zero_witness(q.omega, q.theta)) {
    res.certified_lower = 0.0;
    res.witness = *w;
    res.witness_value = 0.0;
    res.has_witness = true;
    return res;
  }

  EntropySeries series;
  Ctx ctx;
  ctx.fourw4 = 4.0 * q.omega - 4.0;
  ctx.theta4 = 4.0 * q.theta;
  ctx.p0 = q.p0_canonical();
  ctx.p1 = 1.0 - ctx.p0;
  ctx.exact = opt.exact_objective;
  if (!ctx.exact) {
    series = entropy_series(opt.order);
    ctx.series = &series;
  }

  double ub = kInf;
  QubitStrategy best_witness;
  bool have_witness = false;
  auto consider_lifted = [&](const QubitStrategy& s, double v) {
    if (!have_witness || v < ub - 1e-12 ||
        (std::fabs(v - ub) <= 1e-12 && lex_less(s, best_witness))) {
      ub = std::min(v, ub);
      best_witness = s;
      have_witness = true;
    }
  };
  auto consider_reduced = [&](const double l[2], const double m[2]) {
    QubitStrategy s;
    double v;
    if (lift_point(l, m, ctx, s, v) && strategy_feasible(s, q.omega, q.theta, 1e-9))
      consider_lifted(s, v);
  };

  // guaranteed-feasible anchor on or below the quantum boundary
  if (auto w = boundary_witness(q.omega, q.theta)) {
    double v = strategy_entropy(*w, ctx.p0, opt.exact_objective, ctx.series);
    consider_lifted(*w, v);
  }

  // ---- multistart heuristic ----
  auto penalized = [&](const std::array<double, 4>& raw) {
    double l[2], m[2], a[2];
    double pen = 0.0;
    for (int x = 0; x < 2; ++x) {
      l[x] = std::clamp(raw[x], -1.0, 1.0);
      m[x] = std::clamp(raw[2 + x], 0.0, 1.0);
      a[x] = std::sqrt(l[x] * l[x] + m[x] * m[x]);
      if (a[x] > 1.0) {
        pen += (a[x] - 1.0) * (a[x] - 1.0);
        l[x] /= a[x];
        m[x] /= a[x];
        a[x] = 1.0;
      }
    }
    double s_a = std::min(2.0, -ctx.fourw4 + l[0] - l[1]);
    double lhs = (l[0] + l[1]) * (l[0] + l[1]) + (m[0] + m[1]) * (m[0] + m[1]);
    double s_b = ctx.theta4 - std::sqrt(lhs);
    double gapv = std::max(a[0] + a[1], s_b) - s_a + 1e-9;
    if (gapv > 0.0) pen += gapv * gapv;
    double obj = ctx.p0 * ctx.gain(a[0], l[0]) + ctx.p1 * ctx.gain(a[1], l[1]);
    return obj + 1e5 * pen;
  };

  for (int k = 0; k < opt.starts; ++k) {
    auto u = halton_point(static_cast<std::uint64_t>(k) + (opt.seed % 977), 4);
    std::array<double, 4> v = {2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, u[2], u[3]};
    auto [fv, pt] = nelder_mead4(penalized, v, 260);
    (void)fv;
    double l[2] = {std::clamp(pt[0], -1.0, 1.0), std::clamp(pt[1], -1.0, 1.0)};
    double m[2] = {std::clamp(pt[2], 0.0, 1.0), std::clamp(pt[3], 0.0, 1.0)};
    for (int x = 0; x < 2; ++x) {
      double a = std::sqrt(l[x] * l[x] + m[x] * m[x]);
      if (a > 1.0) { l[x] /= a; m[x] /= a; }
    }
    consider_reduced(l, m);
  }

  res.witness_value = ub;
  res.witness = best_witness;
  res.has_witness = have_witness;

  if (opt.mode == BoundMode::heuristic) {
    res.certified_lower = 0.0;  // no certificate in this mode
    return res;
  }

  // ---- branch and bound ----
  auto cmp = [](const Box& a, const Box& b) { return a.lb > b.lb; };
  std::priority_queue<Box, std::vector<Box>, decltype(cmp)> heap(cmp);

  auto try_candidates = [&](const Ranges& r) {
    double l[2], m[2];
    for (int x = 0; x < 2; ++x) {
      l[x] = 0.5 * (r.llo[x] + r.lhi[x]);
      m[x] = std::min(r.mhi[x], std::sqrt(std::max(0.0, 1.0 - l[x] * l[x])));
    }
    consider_reduced(l, m);
    l[0] = r.lhi[0];
    l[1] = r.llo[1];
    for (int x = 0; x < 2; ++x)
      m[x] = std::min(r.mhi[x], std::sqrt(std::max(0.0, 1.0 - l[x] * l[x])));
    consider_reduced(l, m);
  };

  Box root;
  root.lo = {-1.0, -1.0, 0.0, 0.0};
  root.hi = {1.0, 1.0, 1.0, 1.0};
  {
    Ranges r = analyze(root, ctx);
    if (!r.ok || !weight_window_possible(r, ctx)) {
      res.infeasible = !have_witness;
      res.certified_lower = res.infeasible ? kInf : 0.0;
      return res;
    }
    root.lb = objective_lb(r, ctx);
    try_candidates(r);
    heap.push(root);
  }

  double pruned_lb = kInf;
  long explored = 0;
  bool out_of_budget = false;

  while (!heap.empty()) {
    Box box = heap.top();
    if (have_witness && box.lb >= ub - opt.tol) break;
    heap.pop();
    if (++explored > opt.box_budget) { out_of_budget = true; break; }

    int dim = 0;
    double widest = -1.0;
    for (int d = 0; d < 4; ++d) {
      double w = box.hi[d] - box.lo[d];
      if (w > widest) { widest = w; dim = d; }
    }
    double mid = 0.5 * (box.lo[dim] + box.hi[dim]);
    for (int half = 0; half < 2; ++half) {
      Box child = box;
      (half == 0 ? child.hi : child.lo)[dim] = mid;
      Ranges r = analyze(child, ctx);
      if (!r.ok) continue;
      if (!weight_window_possible(r, ctx)) continue;
      child.lb = std::max(box.lb, objective_lb(r, ctx));
      try_candidates(r);
      if (have_witness && child.lb >= ub - opt.tol) {
        pruned_lb = std::min(pruned_lb, child.lb);
        continue;
      }
      heap.push(child);
    }
  }

  res.boxes_explored = explored;
  res.witness_value = ub;
  res.witness = best_witness;
  res.has_witness = have_witness;

  if (heap.empty() && !have_witness && pruned_lb == kInf) {
    res.infeasible = true;
    res.certified_lower = kInf;
    return res;
  }
  double lower = std::min(heap.empty() ? kInf : heap.top().lb, pruned_lb);
  if (lower == kInf) lower = ub;  // everything closed at the witness value
  res.certified_lower = std::max(0.0, std::min(lower, ub));
  res.converged = !out_of_budget;
  return res;
}

}  // namespace randex
