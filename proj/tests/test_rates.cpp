#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "randex/rates.hpp"
#include "randex/rng.hpp"

using namespace randex;

namespace {

ConvexEnvelope constant_envelope(double value, double p0 = 0.5) {
  ConvexEnvelope e;
  e.p0 = p0;
  e.planes.push_back({0.0, 0.0, value});
  return e;
}

RateGrid manual_grid(std::vector<double> g, std::vector<double> w, std::vector<double> t,
                     const std::function<double(double, double, double)>& h) {
  RateGrid grid;
  grid.gamma_axis = std::move(g);
  grid.omega_axis = std::move(w);
  grid.theta_axis = std::move(t);
  grid.values.resize(grid.gamma_axis.size() * grid.omega_axis.size() * grid.theta_axis.size());
  for (std::size_t i = 0; i < grid.gamma_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.omega_axis.size(); ++j)
      for (std::size_t k = 0; k < grid.theta_axis.size(); ++k)
        grid.values[grid.idx(i, j, k)] =
            h(grid.gamma_axis[i], grid.omega_axis[j], grid.theta_axis[k]);
  return grid;
}

// The constraint family used by the fit, mirrored from its documentation:
// f at each grid point stays below the rate at its clamped successor.
bool plane_feasible(const RateGrid& grid, const std::array<double, 3>& c, double d) {
  auto eval = [&](double g, double w, double t) { return c[0] * g + c[1] * w + c[2] * t + d; };
  const std::size_t ng = grid.gamma_axis.size(), nw = grid.omega_axis.size(),
                    nt = grid.theta_axis.size();
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = 0; j < nw; ++j)
      for (std::size_t k = 0; k < nt; ++k) {
        double h = grid.at(std::min(i + 1, ng - 1), std::min(j + 1, nw - 1), std::min(k + 1, nt - 1));
        if (!std::isfinite(h)) continue;
        double lhs = eval(grid.gamma_axis[i], grid.omega_axis[j], grid.theta_axis[k]);
        if (lhs > h + 1e-9) return false;
      }
  return true;
}

}  // namespace

TEST_CASE("stats_from_freq on reference distributions") {
  double p0 = 0.3, gamma = 0.2;
  FreqVector ideal{};
  for (int x = 0; x < 2; ++x) {
    double px = x == 0 ? p0 : 1 - p0;
    ideal.q[0][x][x] = (1 - gamma) * px;  // perfect score
    ideal.q[1][x][0] = gamma * px;        // perfect overlap
  }
  auto s = stats_from_freq(ideal, p0, gamma);
  CHECK(s.omega_q == Catch::Approx(1.0).margin(1e-12));
  CHECK(s.theta_q == Catch::Approx(1.0).margin(1e-12));
  CHECK(s.gamma_q == Catch::Approx(gamma).margin(1e-12));

  FreqVector uniform{};
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) uniform.q[t][x][y] = 0.125;
  auto u = stats_from_freq(uniform, 0.5, 0.5);
  CHECK(u.omega_q == Catch::Approx(0.5).margin(1e-12));
  CHECK(u.theta_q == Catch::Approx(0.5).margin(1e-12));
  CHECK(u.gamma_q == Catch::Approx(0.5).margin(1e-12));

  FreqVector no_tests{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) no_tests.q[0][x][y] = 0.25;
  CHECK(stats_from_freq(no_tests, 0.5, 0.5).gamma_q == 0.0);
}

TEST_CASE("asymptotic rates from an envelope") {
  auto env = constant_envelope(0.5);
  CHECK(asymptotic_rate(RateKind::r1, env, 0.8, 0.9, 0.0, 0.5) == Catch::Approx(0.5));
  CHECK(asymptotic_rate(RateKind::r2_cert, env, 0.8, 0.9, 0.0, 0.5) == Catch::Approx(0.5));
  double g = 0.1;
  CHECK(asymptotic_rate(RateKind::r1, env, 0.8, 0.9, g, 0.5) == Catch::Approx(0.9 * 0.5));
  CHECK(asymptotic_rate(RateKind::r1_noT, env, 0.8, 0.9, g, 0.5) ==
        Catch::Approx(0.9 * 0.5 - g * 1.0 - binary_entropy(g)));
  CHECK(asymptotic_rate(RateKind::r2_expansion, env, 0.8, 0.9, g, 0.5) ==
        Catch::Approx(0.9 * 0.5 - 1.0 - binary_entropy(g)));

  // below the classical line the envelope is clamped at zero
  auto neg = constant_envelope(-0.2);
  CHECK(asymptotic_rate(RateKind::r1, neg, 0.55, 0.9, g, 0.5) == 0.0);
  CHECK(asymptotic_rate(RateKind::r1_noT, neg, 0.55, 0.9, g, 0.5) < 0.0);

  CHECK_THROWS_AS(asymptotic_rate(RateKind::r1, env, 0.8, 0.9, 0.0, 0.3), std::invalid_argument);
}

TEST_CASE("completeness error closed form") {
  ProtocolParams p;
  p.n = 1000000;
  p.p0 = 0.5;
  p.gamma = 0.1;
  p.delta_theta = 0.02;
  p.delta_omega = 0.02;
  double y1 = 0.02 * 0.1 * 0.5, y2 = 0.02 * 0.9 * 0.5;
  double expected = std::exp(-8.0 * 1e6 * (y1 * y1)) + std::exp(-8.0 * 1e6 * (y2 * y2));
  CHECK(completeness_error(p) == expected);  // bit-exact

  ProtocolParams zero = p;
  zero.delta_theta = 0.0;
  zero.delta_omega = 0.0;
  CHECK(completeness_error(zero) == 2.0);

  // monotone decreasing in n and in both widths (parameters chosen so both
  // exponential terms stay far from underflow)
  ProtocolParams small = p;
  small.n = 100000;
  small.delta_theta = 0.005;
  small.delta_omega = 0.005;
  ProtocolParams q = small;
  q.n = 2 * small.n;
  CHECK(completeness_error(q) < completeness_error(small));
  q = small;
  q.delta_theta *= 2;
  CHECK(completeness_error(q) < completeness_error(small));
  q = small;
  q.delta_omega *= 2;
  CHECK(completeness_error(q) < completeness_error(small));
}

TEST_CASE("min-tradeoff fit of a constant surface") {
  auto grid = manual_grid({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0}, {0.0, 0.5, 1.0},
                          [](double, double, double) { return 0.4; });
  auto f = fit_min_tradeoff(grid, {0.5, 0.5, 0.5});
  CHECK(std::fabs(f.c[0]) <= 1e-9);
  CHECK(std::fabs(f.c[1]) <= 1e-9);
  CHECK(std::fabs(f.c[2]) <= 1e-9);
  CHECK(f.d == Catch::Approx(0.4).margin(1e-9));
  CHECK(f.max_f == Catch::Approx(f.d).margin(1e-9));
  CHECK(f.var_bound >= 0.0);
}

TEST_CASE("min-tradeoff fit of an affine surface") {
  auto h = [](double g, double w, double t) { return 0.2 + 0.3 * w + 0.1 * t - 0.15 * g; };
  std::vector<double> ax = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  auto grid = manual_grid(ax, ax, ax, h);
  std::array<double, 3> x_star{0.4, 0.6, 0.6};
  auto f = fit_min_tradeoff(grid, x_star);
  double target = h(x_star[0], x_star[1], x_star[2]);
  double shift = 0.2 * (0.15 + 0.3 + 0.1);  // one cell per axis
  CHECK(f.fit_value <= target + shift + 1e-9);
  CHECK(f.fit_value >= target - shift - 1e-5);
  CHECK(plane_feasible(grid, f.c, f.d));
}

TEST_CASE("min-tradeoff fit beats random feasible planes") {
  auto h = [](double g, double w, double t) {
    return (1.0 - g) * std::max(0.0, 2.0 * (w - 0.6) + 1.2 * (t - 0.6));
  };
  std::vector<double> ax = {0.0, 0.25, 0.5, 0.75, 1.0};
  auto grid = manual_grid(ax, ax, ax, h);
  std::array<double, 3> x_star{0.25, 0.75, 0.75};
  auto f = fit_min_tradeoff(grid, x_star);
  REQUIRE(plane_feasible(grid, f.c, f.d));

  SplitMix64 rng(2027);
  for (int s = 0; s < 1000; ++s) {
    std::array<double, 3> c{4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5),
                            4.0 * (rng.uniform() - 0.5)};
    // best offset for this slope: push the plane up until a constraint binds
    double d = kInf;
    for (std::size_t i = 0; i < ax.size(); ++i)
      for (std::size_t j = 0; j < ax.size(); ++j)
        for (std::size_t k = 0; k < ax.size(); ++k) {
          double bound = grid.at(std::min(i + 1, ax.size() - 1), std::min(j + 1, ax.size() - 1),
                                  std::min(k + 1, ax.size() - 1));
          d = std::min(d, bound - (c[0] * ax[i] + c[1] * ax[j] + c[2] * ax[k]));
        }
    double value = c[0] * x_star[0] + c[1] * x_star[1] + c[2] * x_star[2] + d;
    REQUIRE(value <= f.fit_value + 1e-9);
  }
}

TEST_CASE("min-tradeoff rejects a grid that cannot pin slopes") {
  // a single usable constraint cannot pin four coefficients: the fit is
  // unbounded and must be rejected
  RateGrid grid;
  grid.gamma_axis = {0.0, 1.0};
  grid.omega_axis = {0.0, 1.0};
  grid.theta_axis = {0.0, 0.5, 1.0};
  grid.values.assign(12, kInf);
  grid.values[grid.idx(1, 1, 1)] = 0.3;  // constrains only the theta = 0 face
  CHECK_THROWS_AS(fit_min_tradeoff(grid, {0.9, 0.9, 0.9}), std::invalid_argument);
}

TEST_CASE("accumulated entropy bound") {
  MinTradeoff f;
  f.c = {0.0, 0.0, 0.0};
  f.d = 0.5;
  f.max_f = 0.5;
  f.min_q_f = 0.5;
  f.min_box_f = 0.5;
  ProtocolParams p;
  p.n = 1000000;
  auto zero_v = [](const MinTradeoff&, double, int) { return 0.0; };
  CHECK(eat_min_entropy(p, f, zero_v) == Catch::Approx(5e5));

  // with the default penalty the per-round rate converges to r from below
  double r = f.eval(p.gamma, p.omega_exp - p.delta_omega, p.theta_exp - p.delta_theta);
  double v = default_v_formula(f, p.eps_s, output_alphabet(p.protocol));
  ProtocolParams big = p;
  big.n = 1000000000L;
  double per_round = eat_min_entropy(big, f) / static_cast<double>(big.n);
  CHECK(per_round == Catch::Approx(r - v / std::sqrt(static_cast<double>(big.n))).margin(1e-12));
  CHECK(per_round < r);

  // increasing in n beyond the crossover
  ProtocolParams n1 = p, n2 = p;
  n1.n = 4 * static_cast<long>((v * v) / (r * r));
  n2.n = 2 * n1.n;
  CHECK(eat_min_entropy(n2, f) > eat_min_entropy(n1, f));
}

TEST_CASE("width optimization") {
  auto env = constant_envelope(0.5);
  ProtocolParams p;
  p.n = 1000000;

  // vacuous target: widths collapse to zero and the rate hits the envelope
  auto w = optimize_widths(p, env, 2.0);
  REQUIRE(w.ok);
  CHECK(w.delta_omega <= 1e-12);
  CHECK(w.delta_theta <= 1e-12);

  // concentration: widths shrink with n
  auto w1 = optimize_widths(p, env, 1e-3);
  ProtocolParams p2 = p;
  p2.n = 100 * p.n;
  auto w2 = optimize_widths(p2, env, 1e-3);
  REQUIRE(w1.ok);
  REQUIRE(w2.ok);
  CHECK(w2.delta_omega < w1.delta_omega);
  CHECK(w2.delta_theta < w1.delta_theta);

  // n too small for the target
  ProtocolParams tiny = p;
  tiny.n = 2;
  auto wf = optimize_widths(tiny, env, 1e-9);
  CHECK(!wf.ok);
}

TEST_CASE("width optimization matches an exhaustive grid search") {
  // envelope with a genuine tradeoff between the two widths
  ConvexEnvelope env;
  env.p0 = 0.5;
  env.planes.push_back({2.0, 1.2, -2.0 * 0.8 - 1.2 * 0.9 + 0.5});
  ProtocolParams p;
  p.n = 1000000;
  p.gamma = 0.1;
  double eps = 1e-3;
  auto mine = optimize_widths(p, env, eps);
  REQUIRE(mine.ok);

  double best = -kInf;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      ProtocolParams q = p;
      q.delta_omega = 0.005 * i;
      q.delta_theta = 0.005 * j;
      if (completeness_error(q) > eps) continue;
      best = std::max(best, env.eval(p.omega_exp - q.delta_omega, p.theta_exp - q.delta_theta));
    }
  ProtocolParams q = p;
  q.delta_omega = mine.delta_omega;
  q.delta_theta = mine.delta_theta;
  CHECK(completeness_error(q) <= eps * (1.0 + 1e-9));
  CHECK(env.eval(p.omega_exp - mine.delta_omega, p.theta_exp - mine.delta_theta) >= best - 1e-6);
}
