#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "randex/gridding.hpp"
#include "randex/qubit_bound.hpp"
#include "randex/simplex.hpp"

namespace randex {

enum class PointFlag : std::uint8_t { ok = 0, nonconverged = 1, infeasible = 2 };

// Certified per-round entropy samples on an (omega, theta) grid.
// values is row-major with the omega index outermost; +inf marks points
// proven unreachable by any strategy.
struct RateSurface {
  Gridding grid;  // axes[0] = omega, axes[1] = theta
  std::vector<double> values;
  std::vector<PointFlag> flags;
  double p0 = 0.5;

  std::size_t nw() const { return grid.axes[0].size(); }
  std::size_t nt() const { return grid.axes[1].size(); }
  double& at(std::size_t i, std::size_t j) { return values[i * nt() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * nt() + j]; }

  void validate() const {
    grid.validate();
    if (grid.axes.size() != 2) throw std::invalid_argument("RateSurface: need 2 axes");
    if (values.size() != nw() * nt()) throw std::invalid_argument("RateSurface: size mismatch");
  }
};

struct Hyperplane {
  double k_omega = 0.0, k_theta = 0.0, offset = 0.0;
  double eval(double w, double t) const { return k_omega * w + k_theta * t + offset; }
};

// Max of supporting hyperplanes: convex by construction, and a certified
// lower bound wherever the planes lower-bound the sampled surface.
struct ConvexEnvelope {
  std::vector<Hyperplane> planes;
  double p0 = 0.5;

  double eval(double w, double t) const {
    double best = -kInf;
    for (const auto& h : planes) best = std::max(best, h.eval(w, t));
    return best;
  }
};

// Discrete Legendre-Fenchel conjugate: for each slope k returns
// max_i (k*xs[i] - fs[i]). Linear in |xs|+|slopes|: the maximizer is found on
// the lower convex hull, along which it moves monotonically with k.
inline std::vector<double> discrete_conjugate(const std::vector<double>& xs,
                                              const std::vector<double>& fs,
                                              const std::vector<double>& slopes) {
  if (xs.size() != fs.size()) throw std::invalid_argument("discrete_conjugate: length mismatch");
  if (xs.empty()) throw std::invalid_argument("discrete_conjugate: empty input");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("discrete_conjugate: xs not increasing");
  for (std::size_t i = 1; i < slopes.size(); ++i)
    if (slopes[i] < slopes[i - 1]) throw std::invalid_argument("discrete_conjugate: slopes not sorted");

  // lower hull by monotone chain
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      double cross = (xs[b] - xs[a]) * (fs[i] - fs[a]) - (fs[b] - fs[a]) * (xs[i] - xs[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }

  std::vector<double> out(slopes.size());
  std::size_t idx = 0;
  for (std::size_t s = 0; s < slopes.size(); ++s) {
    double k = slopes[s];
    while (idx + 1 < hull.size() &&
           k * xs[hull[idx + 1]] - fs[hull[idx + 1]] >= k * xs[hull[idx]] - fs[hull[idx]])
      ++idx;
    out[s] = k * xs[hull[idx]] - fs[hull[idx]];
  }
  return out;
}

// Slope grid spanning the finite-difference slopes of the surface along each
// axis, padded by 20% on both sides.
inline Gridding auto_slope_grid(const RateSurface& surface, std::size_t points_per_axis = 65) {
  surface.validate();
  double lo[2] = {kInf, kInf}, hi[2] = {-kInf, -kInf};
  auto feed = [&](int axis, double slope) {
    lo[axis] = std::min(lo[axis], slope);
    hi[axis] = std::max(hi[axis], slope);
  };
  for (std::size_t i = 0; i < surface.nw(); ++i)
    for (std::size_t j = 0; j < surface.nt(); ++j) {
      double v = surface.at(i, j);
      if (!std::isfinite(v)) continue;
      if (i + 1 < surface.nw() && std::isfinite(surface.at(i + 1, j)))
        feed(0, (surface.at(i + 1, j) - v) / (surface.grid.axes[0][i + 1] - surface.grid.axes[0][i]));
      if (j + 1 < surface.nt() && std::isfinite(surface.at(i, j + 1)))
        feed(1, (surface.at(i, j + 1) - v) / (surface.grid.axes[1][j + 1] - surface.grid.axes[1][j]));
    }
  Gridding g;
  for (int axis = 0; axis < 2; ++axis) {
    if (!(lo[axis] <= hi[axis])) { lo[axis] = -1.0; hi[axis] = 1.0; }
    double span = std::max(hi[axis] - lo[axis], 1e-6);
    double a = lo[axis] - 0.2 * span, b = hi[axis] + 0.2 * span;
    std::vector<double> ax(points_per_axis);
    for (std::size_t i = 0; i < points_per_axis; ++i)
      ax[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points_per_axis - 1);
    g.axes.push_back(std::move(ax));
  }
  g.validate();
  return g;
}

namespace detail_env {

struct Sample {
  double w, t, f;
};

inline std::vector<Sample> finite_samples(const RateSurface& s) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < s.nw(); ++i)
    for (std::size_t j = 0; j < s.nt(); ++j)
      if (std::isfinite(s.at(i, j)))
        out.push_back({s.grid.axes[0][i], s.grid.axes[1][j], s.at(i, j)});
  return out;
}

// Best supporting plane at p: the dual of the convex-combination program
//   min sum mu_s f_s  s.t.  sum mu_s (w_s, t_s, 1) = (p_w, p_t, 1), mu >= 0.
// Its multipliers are exactly the plane coefficients (k_w, k_t, offset).
// Four ray columns bound the slopes by slope_cap, which prunes degenerate
// vertices whose wild slopes would poison evaluation away from the samples;
// the cap sits far above every difference quotient, so values at the samples
// are unaffected.
inline bool support_plane_at(const std::vector<Sample>& samples, double pw, double pt,
                             double slope_cap, Hyperplane& out) {
  const std::size_t n = samples.size();
  std::vector<std::vector<double>> A(3, std::vector<double>(n + 4));
  std::vector<double> c(n + 4);
  for (std::size_t s = 0; s < n; ++s) {
    A[0][s] = samples[s].w;
    A[1][s] = samples[s].t;
    A[2][s] = 1.0;
    c[s] = samples[s].f;
  }
  const double dir[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (std::size_t r = 0; r < 4; ++r) {
    A[0][n + r] = dir[r][0];
    A[1][n + r] = dir[r][1];
    A[2][n + r] = 0.0;
    c[n + r] = slope_cap;
  }
  auto r = lp::SimplexSolver::solve_min(A, {pw, pt, 1.0}, c);
  if (r.status != lp::Status::optimal) return false;
  out = {r.dual[0], r.dual[1], r.dual[2]};
  return true;
}

}  // namespace detail_env

// Biconjugate convex envelope of the finite samples of a surface.
// The double conjugate is computed axis-by-axis with discrete_conjugate over
// the slope grid; afterwards each grid point gets its exact optimal
// supporting plane so the envelope agrees with the true lower convex hull at
// every sample point (the finite slope grid alone cannot guarantee that).
inline ConvexEnvelope convex_envelope_2d(const RateSurface& surface, const Gridding& slope_grid) {
  surface.validate();
  slope_grid.validate();
  if (slope_grid.axes.size() != 2) throw std::invalid_argument("convex_envelope_2d: need 2 slope axes");
  auto samples = detail_env::finite_samples(surface);
  if (samples.size() < 2) throw std::invalid_argument("convex_envelope_2d: degenerate surface");

  ConvexEnvelope env;
  env.p0 = surface.p0;
  const auto& ks1 = slope_grid.axes[0];
  const auto& ks2 = slope_grid.axes[1];

  // inner conjugate along theta for every omega row with finite entries
  std::vector<double> row_w;
  std::vector<std::vector<double>> row_conj;  // per kept row: conjugate over ks2
  for (std::size_t i = 0; i < surface.nw(); ++i) {
    std::vector<double> ts, fs;
    for (std::size_t j = 0; j < surface.nt(); ++j)
      if (std::isfinite(surface.at(i, j))) {
        ts.push_back(surface.grid.axes[1][j]);
        fs.push_back(surface.at(i, j));
      }
    if (ts.empty()) continue;
    if (ts.size() == 1) {
      std::vector<double> g(ks2.size());
      for (std::size_t s = 0; s < ks2.size(); ++s) g[s] = ks2[s] * ts[0] - fs[0];
      row_conj.push_back(std::move(g));
    } else {
      row_conj.push_back(discrete_conjugate(ts, fs, ks2));
    }
    row_w.push_back(surface.grid.axes[0][i]);
  }

  // outer conjugate along omega, one pass per theta-slope
  std::vector<double> neg(row_w.size());
  for (std::size_t s2 = 0; s2 < ks2.size(); ++s2) {
    for (std::size_t i = 0; i < row_w.size(); ++i) neg[i] = -row_conj[i][s2];
    std::vector<double> fstar =
        row_w.size() == 1
            ? std::vector<double>{ks1.front() * row_w[0] - neg[0]}
            : discrete_conjugate(row_w, neg, ks1);
    if (row_w.size() == 1) {
      for (std::size_t s1 = 0; s1 < ks1.size(); ++s1)
        env.planes.push_back({ks1[s1], ks2[s2], -(ks1[s1] * row_w[0] - neg[0])});
    } else {
      for (std::size_t s1 = 0; s1 < ks1.size(); ++s1)
        env.planes.push_back({ks1[s1], ks2[s2], -fstar[s1]});
    }
  }

  // exact tightening: optimal supporting plane at every finite grid point
  double slope_cap = 1.0;
  for (const auto& ax : auto_slope_grid(surface, 2).axes)
    slope_cap = std::max({slope_cap, std::fabs(ax.front()), std::fabs(ax.back())});
  slope_cap *= 16.0;
  for (const auto& smp : samples) {
    Hyperplane h;
    if (detail_env::support_plane_at(samples, smp.w, smp.t, slope_cap, h)) env.planes.push_back(h);
  }

  // drop duplicates
  std::sort(env.planes.begin(), env.planes.end(), [](const Hyperplane& a, const Hyperplane& b) {
    if (a.k_omega != b.k_omega) return a.k_omega < b.k_omega;
    if (a.k_theta != b.k_theta) return a.k_theta < b.k_theta;
    return a.offset < b.offset;
  });
  env.planes.erase(std::unique(env.planes.begin(), env.planes.end(),
                               [](const Hyperplane& a, const Hyperplane& b) {
                                 return std::fabs(a.k_omega - b.k_omega) < 1e-12 &&
                                        std::fabs(a.k_theta - b.k_theta) < 1e-12 &&
                                        std::fabs(a.offset - b.offset) < 1e-12;
                               }),
                   env.planes.end());
  return env;
}

struct SurfaceConfig {
  BoundOptions bound;
  int threads = 0;  // 0: hardware concurrency
};

// Evaluate the certified round-entropy bound on a grid, apply the
// one-cell-down shift that makes the samples valid over whole grid cells,
// clamp the trivially-zero half planes, and take the convex envelope.
// Non-converged solver points are downgraded to zero, never dropped.
inline std::pair<RateSurface, ConvexEnvelope> build_rate_surface(double p0, const Gridding& grid,
                                                                 const SurfaceConfig& cfg = {}) {
  grid.validate();
  if (grid.axes.size() != 2) throw std::invalid_argument("build_rate_surface: need 2 axes");

  RateSurface raw;
  raw.grid = grid;
  raw.p0 = p0;
  const std::size_t nw = grid.axes[0].size(), nt = grid.axes[1].size();
  raw.values.assign(nw * nt, 0.0);
  raw.flags.assign(nw * nt, PointFlag::ok);

  unsigned nthreads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= nw * nt) return;
      double w = grid.axes[0][idx / nt], t = grid.axes[1][idx % nt];
      BoundResult r = round_entropy_bound({w, t, p0}, cfg.bound);
      if (r.infeasible) {
        raw.values[idx] = kInf;
        raw.flags[idx] = PointFlag::infeasible;
      } else if (!r.converged) {
        raw.values[idx] = 0.0;  // keep soundness, lose tightness
        raw.flags[idx] = PointFlag::nonconverged;
      } else {
        raw.values[idx] = r.certified_lower;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k + 1 < nthreads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // zero clamp on the trivially-zero half planes
  for (std::size_t i = 0; i < nw; ++i)
    for (std::size_t j = 0; j < nt; ++j)
      if (grid.axes[0][i] <= 0.5 + 1e-12 || grid.axes[1][j] <= 0.5 + 1e-12) {
        raw.at(i, j) = 0.0;
        raw.flags[i * nt + j] = PointFlag::ok;
      }

  // monotone cleanup: the bound is nondecreasing in both arguments, so the
  // running maximum is still a valid bound (and +inf propagates upward)
  for (std::size_t i = 0; i < nw; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      if (i > 0) raw.at(i, j) = std::max(raw.at(i, j), raw.at(i - 1, j));
      if (j > 0) raw.at(i, j) = std::max(raw.at(i, j), raw.at(i, j - 1));
    }

  // one-cell shift: the value stored at a grid point must certify the whole
  // cell below it, so each interior point takes its diagonal predecessor
  RateSurface shifted = raw;
  for (std::size_t i = 0; i < nw; ++i)
    for (std::size_t j = 0; j < nt; ++j)
      shifted.at(i, j) = raw.at(i > 0 ? i - 1 : 0, j > 0 ? j - 1 : 0);

  ConvexEnvelope env = convex_envelope_2d(shifted, auto_slope_grid(shifted));
  env.p0 = p0;
  return {std::move(raw), std::move(env)};
}

// ---- serialization ----

inline void write_surface_csv(const RateSurface& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "omega,theta,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < s.nw(); ++i)
    for (std::size_t j = 0; j < s.nt(); ++j)
      out << s.grid.axes[0][i] << ',' << s.grid.axes[1][j] << ',' << s.at(i, j) << '\n';
}

inline nlohmann::json envelope_to_json(const ConvexEnvelope& e) {
  nlohmann::json planes = nlohmann::json::array();
  for (const auto& h : e.planes) planes.push_back({h.k_omega, h.k_theta, h.offset});
  return {{"p0", e.p0}, {"planes", planes}};
}

inline ConvexEnvelope envelope_from_json(const nlohmann::json& j) {
  ConvexEnvelope e;
  e.p0 = j.at("p0").get<double>();
  for (const auto& p : j.at("planes")) e.planes.push_back({p[0], p[1], p[2]});
  return e;
}

inline void write_surface_meta(const RateSurface& s, const ConvexEnvelope& env,
                               const nlohmann::json& solver_config, const std::string& path) {
  nlohmann::json flags = nlohmann::json::array();
  for (auto f : s.flags) flags.push_back(static_cast<int>(f));
  nlohmann::json j = {{"omega_axis", s.grid.axes[0]},
                      {"theta_axis", s.grid.axes[1]},
                      {"p0", s.p0},
                      {"solver", solver_config},
                      {"flags", flags},
                      {"envelope", envelope_to_json(env)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace randex
