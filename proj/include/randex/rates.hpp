#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "randex/entropy.hpp"
#include "randex/envelope.hpp"
#include "randex/simplex.hpp"

namespace randex {

enum class Protocol { recycling, public_input };

// recycling: all of (T,X,Y) feeds the extractor; public_input: only Y does.
inline int output_alphabet(Protocol p) { return p == Protocol::recycling ? 8 : 2; }

struct ProtocolParams {
  long n = 0;
  double p0 = 0.5;       // p_X(0), at most 1/2
  double gamma = 0.1;    // test probability
  double theta_exp = 0.9;
  double delta_theta = 0.02;
  double omega_exp = 0.8;
  double delta_omega = 0.02;
  double eps_c = 1e-3;
  double eps_s = 1e-6;
  Protocol protocol = Protocol::recycling;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ProtocolParams: n must be >= 1");
    if (!(p0 > 0.0) || p0 > 0.5 + 1e-12) throw std::invalid_argument("ProtocolParams: p0 outside (0,1/2]");
    if (!(gamma > 0.0) || gamma > 0.5 + 1e-12) throw std::invalid_argument("ProtocolParams: gamma outside (0,1/2]");
    if (theta_exp <= 0.5 || theta_exp > 1.0) throw std::invalid_argument("ProtocolParams: theta_exp outside (1/2,1]");
    if (omega_exp < 0.0 || omega_exp > 1.0) throw std::invalid_argument("ProtocolParams: omega_exp outside [0,1]");
    if (delta_theta < 0.0 || delta_omega < 0.0)
      throw std::invalid_argument("ProtocolParams: confidence widths must be nonnegative");
    if (!(eps_c > 0.0) || !(eps_s > 0.0) || eps_s >= 1.0)
      throw std::invalid_argument("ProtocolParams: error parameters out of range");
  }
};

// Distribution over a round record (t, x, y).
struct FreqVector {
  double q[2][2][2] = {};

  void validate() const {
    double sum = 0.0;
    for (int t = 0; t < 2; ++t)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          if (q[t][x][y] < -1e-12) throw std::invalid_argument("FreqVector: negative entry");
          sum += q[t][x][y];
        }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("FreqVector: entries must sum to 1");
  }
};

struct RoundStats {
  double omega_q = 0.0, theta_q = 0.0, gamma_q = 0.0;
};

inline RoundStats stats_from_freq(const FreqVector& f, double p0, double gamma) {
  f.validate();
  if (!(p0 > 0.0) || !(p0 < 1.0) || !(gamma > 0.0) || !(gamma < 1.0))
    throw std::domain_error("stats_from_freq: p0 and gamma must lie in (0,1)");
  if (p0 * gamma < 1e-300 || (1.0 - p0) * (1.0 - gamma) < 1e-300)
    throw std::domain_error("stats_from_freq: p0*gamma underflow");
  RoundStats s;
  s.omega_q = f.q[0][0][0] / (2.0 * (1.0 - gamma) * p0) + f.q[0][1][1] / (2.0 * (1.0 - gamma) * (1.0 - p0));
  s.theta_q = f.q[1][0][0] / (2.0 * gamma * p0) + f.q[1][1][0] / (2.0 * gamma * (1.0 - p0));
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) s.gamma_q += f.q[1][x][y];
  return s;
}

enum class RateKind { r1, r1_noT, r2_cert, r2_expansion };

// Asymptotic rates. The envelope value is clamped at zero (it is a lower
// bound on a nonnegative entropy); the input-randomness debits can push the
// reported rate negative, which means no expansion.
inline double asymptotic_rate(RateKind kind, const ConvexEnvelope& env, double omega, double theta,
                              double gamma, double p0) {
  if (std::fabs(std::min(p0, 1.0 - p0) - std::min(env.p0, 1.0 - env.p0)) > 1e-9)
    throw std::invalid_argument("asymptotic_rate: envelope built for a different p0");
  double f = std::max(0.0, env.eval(omega, theta));
  double base = (1.0 - gamma) * f;
  switch (kind) {
    case RateKind::r1: return base;
    case RateKind::r1_noT: return base - gamma * binary_entropy(p0) - binary_entropy(gamma);
    case RateKind::r2_cert: return base;
    case RateKind::r2_expansion: return base - binary_entropy(p0) - binary_entropy(gamma);
  }
  return base;
}

// Rate samples over a (gamma, omega, theta) grid; +inf marks grid points
// whose statistics no strategy can produce, which exempts them from the
// min-tradeoff constraints.
struct RateGrid {
  std::vector<double> gamma_axis, omega_axis, theta_axis;
  std::vector<double> values;  // gamma-major, then omega, then theta

  std::size_t idx(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * omega_axis.size() + j) * theta_axis.size() + k;
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[idx(i, j, k)]; }

  void validate() const {
    auto check_axis = [](const std::vector<double>& ax) {
      if (ax.size() < 2) throw std::invalid_argument("RateGrid: axis needs >= 2 points");
      for (std::size_t i = 1; i < ax.size(); ++i)
        if (!(ax[i] > ax[i - 1])) throw std::invalid_argument("RateGrid: axis not increasing");
    };
    check_axis(gamma_axis);
    check_axis(omega_axis);
    check_axis(theta_axis);
    if (values.size() != gamma_axis.size() * omega_axis.size() * theta_axis.size())
      throw std::invalid_argument("RateGrid: size mismatch");
  }
};

// Statistics a real device can exhibit: any overlap, and a score within the
// achievable band around 1/2. Evaluated with a one-cell dilation so that the
// cells straddling the boundary stay constrained.
inline bool stats_reachable(double omega_prev, double theta_prev) {
  if (theta_prev <= 0.5 + 1e-12) return true;
  return omega_prev <= quantum_max_score(theta_prev) + 1e-12;
}

inline RateGrid make_rate_grid(const ConvexEnvelope& env, std::vector<double> gamma_axis,
                               std::vector<double> omega_axis, std::vector<double> theta_axis) {
  RateGrid g;
  g.gamma_axis = std::move(gamma_axis);
  g.omega_axis = std::move(omega_axis);
  g.theta_axis = std::move(theta_axis);
  const std::size_t ng = g.gamma_axis.size(), nw = g.omega_axis.size(), nt = g.theta_axis.size();
  g.values.assign(ng * nw * nt, kInf);

  // envelope samples, forced monotone along both axes (the true rate bound is
  // monotone; running max keeps validity and repairs plane-set wiggle)
  std::vector<double> e(nw * nt, kInf);
  for (std::size_t j = 0; j < nw; ++j)
    for (std::size_t k = 0; k < nt; ++k) {
      double w = g.omega_axis[j], t = g.theta_axis[k];
      double wp = g.omega_axis[j > 0 ? j - 1 : 0], tp = g.theta_axis[k > 0 ? k - 1 : 0];
      if (!stats_reachable(wp, tp)) continue;
      // the envelope is only meaningful over its sampled square; the rate is
      // zero on the trivially-zero half planes anyway
      double v = (w <= 0.5 + 1e-12 || t <= 0.5 + 1e-12) ? 0.0 : std::max(0.0, env.eval(w, t));
      if (j > 0 && std::isfinite(e[(j - 1) * nt + k])) v = std::max(v, e[(j - 1) * nt + k]);
      if (k > 0 && std::isfinite(e[j * nt + k - 1])) v = std::max(v, e[j * nt + k - 1]);
      e[j * nt + k] = v;
    }
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < nw; ++j)
      for (std::size_t k = 0; k < nt; ++k)
        if (std::isfinite(e[j * nt + k]))
          g.values[g.idx(i, j, k)] = (1.0 - g.gamma_axis[i]) * e[j * nt + k];
  g.validate();
  return g;
}

// Affine lower bound on the rate surface: f(gamma, omega, theta) = c.x + d.
struct MinTradeoff {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  double d = 0.0;
  double max_f = 0.0;    // over the [0,1]^3 box
  double min_q_f = 0.0;  // over the quantum-achievable slice
  double min_box_f = 0.0;
  double var_bound = 0.0;
  double fit_value = 0.0;  // f at the observed point

  double eval(double gamma, double omega, double theta) const {
    return c[0] * gamma + c[1] * omega + c[2] * theta + d;
  }
};

// Fit the best affine function below the shifted rate grid at the observed
// point: each grid point is bounded by the rate at its successor in every
// axis, f(x_-) <= H(x), clamping at the grid edge. Successors marked +inf
// (statistics no strategy can produce) impose no constraint. The LP is
// solved exactly through its dual; feasibility of the returned plane is
// re-verified against every constraint afterwards.
inline MinTradeoff fit_min_tradeoff(const RateGrid& grid,
                                    const std::array<double, 3>& observed) {
  grid.validate();
  const std::size_t ng = grid.gamma_axis.size(), nw = grid.omega_axis.size(),
                    nt = grid.theta_axis.size();

  // constraint rows: point . (c,d) <= bound
  std::vector<std::array<double, 4>> rows;
  std::vector<double> bounds;
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < nw; ++j)
      for (std::size_t k = 0; k < nt; ++k) {
        double h = grid.at(std::min(i + 1, ng - 1), std::min(j + 1, nw - 1),
                           std::min(k + 1, nt - 1));
        if (!std::isfinite(h)) continue;
        rows.push_back({grid.gamma_axis[i], grid.omega_axis[j], grid.theta_axis[k], 1.0});
        bounds.push_back(h);
      }
  if (rows.empty()) throw std::invalid_argument("fit_min_tradeoff: no usable constraints");

  // dual: min bounds.y s.t. rows^T y = (observed, 1), y >= 0
  const std::size_t m = rows.size();
  std::vector<std::vector<double>> At(4, std::vector<double>(m));
  for (std::size_t r = 0; r < m; ++r)
    for (int comp = 0; comp < 4; ++comp) At[comp][r] = rows[r][comp];
  auto sol = lp::SimplexSolver::solve_min(At, {observed[0], observed[1], observed[2], 1.0}, bounds);
  if (sol.status == lp::Status::infeasible)
    throw std::invalid_argument("fit_min_tradeoff: grid does not pin all slopes (unbounded fit)");
  if (sol.status == lp::Status::unbounded)
    throw std::logic_error("fit_min_tradeoff: constraint system infeasible");

  MinTradeoff f;
  f.c = {sol.dual[0], sol.dual[1], sol.dual[2]};
  f.d = sol.dual[3];
  f.fit_value = sol.value;

  // deterministic polish for the degenerate flat case
  {
    bool const_ok = true;
    for (std::size_t r = 0; r < m && const_ok; ++r) const_ok = sol.value <= bounds[r] + 1e-11;
    if (const_ok) {
      f.c = {0.0, 0.0, 0.0};
      f.d = sol.value;
    }
  }

  // exhaustive feasibility re-check
  for (std::size_t r = 0; r < m; ++r) {
    double lhs = rows[r][0] * f.c[0] + rows[r][1] * f.c[1] + rows[r][2] * f.c[2] + f.d;
    if (lhs > bounds[r] + 1e-7) throw std::logic_error("fit_min_tradeoff: infeasible fit");
  }

  // statistics of the fitted plane
  f.max_f = -kInf;
  f.min_box_f = kInf;
  for (int corner = 0; corner < 8; ++corner) {
    double v = f.eval(corner & 1 ? 1.0 : 0.0, corner & 2 ? 1.0 : 0.0, corner & 4 ? 1.0 : 0.0);
    f.max_f = std::max(f.max_f, v);
    f.min_box_f = std::min(f.min_box_f, v);
  }
  std::vector<double> gammas = {0.0, 1.0};
  gammas.insert(gammas.end(), grid.gamma_axis.begin(), grid.gamma_axis.end());
  double min_q = kInf;
  const int nq = 100;
  for (int jw = 0; jw <= nq; ++jw)
    for (int kt = 0; kt <= nq; ++kt) {
      double w = static_cast<double>(jw) / nq, t = static_cast<double>(kt) / nq;
      if (w > quantum_max_score(t) + 1e-12) continue;
      for (double gv : gammas) min_q = std::min(min_q, f.eval(gv, w, t));
    }
  // sampling slack, subtracted so the reported minimum stays conservative
  min_q -= (std::fabs(f.c[1]) + std::fabs(f.c[2])) / nq;
  f.min_q_f = min_q;

  double mu = f.eval(observed[0], observed[1], observed[2]);
  f.var_bound = std::max(0.0, (f.max_f - mu) * (mu - f.min_box_f));
  return f;
}

using VFormula = std::function<double(const MinTradeoff&, double eps_s, int alphabet)>;

// Second-order penalty coefficient of the accumulation bound. The shape
// n*r - sqrt(n)*v is fixed; this particular v is a documented default and
// deliberately pluggable.
inline double default_v_formula(const MinTradeoff& f, double eps_s, int alphabet) {
  double spread = std::ceil(std::max(0.0, f.max_f - f.min_q_f));
  return 2.0 * (std::log2(1.0 + 2.0 * alphabet) + spread) * std::sqrt(1.0 - 2.0 * std::log2(eps_s));
}

// Accumulated smooth min-entropy over n rounds: n*r - sqrt(n)*v evaluated at
// the worst accepted statistics.
inline double eat_min_entropy(const ProtocolParams& p, const MinTradeoff& f,
                              const VFormula& vf = default_v_formula) {
  p.validate();
  double r = f.eval(p.gamma, p.omega_exp - p.delta_omega, p.theta_exp - p.delta_theta);
  double v = vf(f, p.eps_s, output_alphabet(p.protocol));
  double n = static_cast<double>(p.n);
  return n * r - std::sqrt(n) * v;
}

// Union bound on the probability that an honest device trips the abort rule.
inline double completeness_error(const ProtocolParams& p) {
  p.validate();
  double n = static_cast<double>(p.n);
  double a = p.delta_theta * p.gamma * p.p0;
  double b = p.delta_omega * (1.0 - p.gamma) * p.p0;
  return std::exp(-8.0 * n * (a * a)) + std::exp(-8.0 * n * (b * b));
}

struct WidthChoice {
  bool ok = false;
  double delta_omega = 0.0, delta_theta = 0.0;
};

// Pick confidence widths meeting the completeness target while maximizing the
// certified rate at the worst accepted point. The completeness budget is
// split between the two Hoeffding terms; each split determines the widths
// exactly, so the search is one-dimensional.
inline WidthChoice optimize_widths(const ProtocolParams& base, const ConvexEnvelope& env,
                                   double eps_c_target) {
  if (!(eps_c_target > 0.0)) throw std::invalid_argument("optimize_widths: target must be positive");
  double n = static_cast<double>(base.n);

  auto widths_for = [&](double share_theta) {
    double e1 = share_theta * eps_c_target;
    double e2 = (1.0 - share_theta) * eps_c_target;
    double dt = e1 >= 1.0 ? 0.0 : std::sqrt(std::log(1.0 / e1) / (8.0 * n)) / (base.gamma * base.p0);
    double dw = e2 >= 1.0 ? 0.0
                          : std::sqrt(std::log(1.0 / e2) / (8.0 * n)) / ((1.0 - base.gamma) * base.p0);
    // a width beyond the expected value makes that abort test vacuous
    return std::pair<double, double>{std::min(dw, base.omega_exp), std::min(dt, base.theta_exp)};
  };
  auto value = [&](double share) {
    auto [dw, dt] = widths_for(share);
    ProtocolParams trial = base;
    trial.delta_omega = dw;
    trial.delta_theta = dt;
    if (completeness_error(trial) > eps_c_target * (1.0 + 1e-12)) return -kInf;
    double w = base.omega_exp - dw, t = base.theta_exp - dt;
    return (w <= 0.5 || t <= 0.5) ? 0.0 : std::max(0.0, env.eval(w, t));
  };

  double best_share = -1.0, best_val = -kInf, best_dw = kInf, best_dt = kInf;
  for (int i = 1; i < 400; ++i) {
    double share = static_cast<double>(i) / 400.0;
    double v = value(share);
    auto [dw, dt] = widths_for(share);
    bool better = v > best_val + 1e-15;
    bool tie = std::fabs(v - best_val) <= 1e-15;
    if (better || (tie && (dw < best_dw - 1e-15 ||
                           (std::fabs(dw - best_dw) <= 1e-15 && dt < best_dt)))) {
      best_val = v;
      best_share = share;
      best_dw = dw;
      best_dt = dt;
    }
  }
  WidthChoice out;
  if (best_share < 0.0 || best_val == -kInf) return out;
  // golden-section refinement around the best grid share
  double lo = std::max(1e-9, best_share - 1.0 / 400.0), hi = std::min(1.0 - 1e-9, best_share + 1.0 / 400.0);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = value(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = value(x1);
    }
  }
  double share = (f1 >= f2) ? x1 : x2;
  if (!(value(share) > best_val + 1e-15)) share = best_share;  // refine only on strict gain
  if (value(share) == -kInf) return out;
  auto [dw, dt] = widths_for(share);
  out.ok = true;
  out.delta_omega = dw;
  out.delta_theta = dt;
  return out;
}

namespace detail_rates {

inline std::vector<double> merged_axis(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out;
  for (double p : pts)
    if (p >= lo - 1e-12 && p <= hi + 1e-12) out.push_back(std::clamp(p, lo, hi));
  out.push_back(lo);
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
            out.end());
  return out;
}

// Grid axes for the tradeoff fit: coarse coverage of the unit box plus a
// fine patch around the operating point (the fit costs one grid cell of
// shift, so the cells next to the accepted statistics must be small).
inline RateGrid tradeoff_grid(const ConvexEnvelope& env, double gamma, double omega_star,
                              double theta_star) {
  // the fit pays one gamma cell of shift, so that axis stays uniformly fine
  std::vector<double> gam = {0.5 * gamma, gamma, gamma + 0.002, gamma + 0.01};
  for (int i = 0; i <= 50; ++i) gam.push_back(0.02 * i);
  std::vector<double> om = {0.0, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95,
                            omega_star - 0.01, omega_star - 0.004, omega_star - 0.002,
                            omega_star, omega_star + 0.002, omega_star + 0.01};
  std::vector<double> th = {0.0, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95,
                            theta_star - 0.01, theta_star - 0.004, theta_star - 0.002,
                            theta_star, theta_star + 0.002, theta_star + 0.01};
  return make_rate_grid(env, merged_axis(gam, 0.0, 1.0), merged_axis(om, 0.0, 1.0),
                        merged_axis(th, 0.0, 1.0));
}

}  // namespace detail_rates

struct ExpansionPoint {
  double n = 0.0;
  double rate_net = -kInf;
  double rate_asymptotic = 0.0;
  double delta_omega = 0.0, delta_theta = 0.0;
  double eps_c = 0.0, eps_s = 0.0;
  bool ok = false;
};

// Net expansion rate per round across a sweep of round counts. For each n the
// confidence widths are re-optimized, a fresh min-tradeoff is fitted at the
// worst accepted point, and the extractor loss (and, without recycling, the
// input randomness) is debited.
inline std::vector<ExpansionPoint> expansion_curve(const ProtocolParams& base,
                                                   const std::vector<double>& round_counts,
                                                   const ConvexEnvelope& env, double eps_ext,
                                                   const VFormula& vf = default_v_formula) {
  if (!(eps_ext > 0.0) || eps_ext >= 1.0) throw std::invalid_argument("expansion_curve: bad eps_ext");
  std::vector<ExpansionPoint> out;
  double input_debit = base.protocol == Protocol::public_input
                           ? binary_entropy(base.p0) + binary_entropy(base.gamma)
                           : 0.0;
  RateKind asym_kind =
      base.protocol == Protocol::public_input ? RateKind::r2_expansion : RateKind::r1;
  double asym = asymptotic_rate(asym_kind, env, base.omega_exp, base.theta_exp, base.gamma, base.p0);

  for (double nr : round_counts) {
    ExpansionPoint pt;
    pt.n = nr;
    pt.eps_c = base.eps_c;
    pt.eps_s = base.eps_s;
    pt.rate_asymptotic = asym;
    ProtocolParams p = base;
    p.n = static_cast<long>(nr);
    auto widths = optimize_widths(p, env, base.eps_c);
    if (!widths.ok) {
      out.push_back(pt);
      continue;
    }
    p.delta_omega = widths.delta_omega;
    p.delta_theta = widths.delta_theta;
    pt.delta_omega = widths.delta_omega;
    pt.delta_theta = widths.delta_theta;
    double wstar = p.omega_exp - p.delta_omega, tstar = p.theta_exp - p.delta_theta;
    auto grid = detail_rates::tradeoff_grid(env, p.gamma, wstar, tstar);
    auto f = fit_min_tradeoff(grid, {p.gamma, wstar, tstar});
    double hmin = eat_min_entropy(p, f, vf);
    pt.rate_net = (hmin - 2.0 * std::log2(1.0 / eps_ext)) / nr - input_debit;
    pt.ok = true;
    out.push_back(pt);
  }
  return out;
}

inline void write_expansion_csv(const std::vector<ExpansionPoint>& pts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n,rate_net,rate_asymptotic,delta_omega,delta_theta,eps_c,eps_s\n";
  out.precision(12);
  for (const auto& p : pts)
    out << p.n << ',' << p.rate_net << ',' << p.rate_asymptotic << ',' << p.delta_omega << ','
        << p.delta_theta << ',' << p.eps_c << ',' << p.eps_s << '\n';
}

}  // namespace randex
