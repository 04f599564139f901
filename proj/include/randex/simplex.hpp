#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace randex::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;     // primal solution
  std::vector<double> dual;  // one multiplier per equality row
};

// Dense two-phase tableau simplex with Bland's rule for
//     min c.x   s.t.  A x = b,  x >= 0.
// Intended for problems with few rows and possibly many columns; every pivot
// touches the full tableau. Bland's rule keeps it deterministic and cycle-free.
class SimplexSolver {
 public:
  static constexpr double kEps = 1e-9;

  static Result solve_min(const std::vector<std::vector<double>>& A,
                          std::vector<double> b, const std::vector<double>& c) {
    const std::size_t m = A.size();
    if (m == 0) throw std::invalid_argument("simplex: no rows");
    const std::size_t n = A[0].size();
    if (c.size() != n || b.size() != m) throw std::invalid_argument("simplex: shape mismatch");

    // Tableau: m constraint rows + cost row; columns = n structural,
    // m artificial, rhs.
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * A[i][j];
      t[i][n + i] = 1.0;
      t[i][cols - 1] = sign * b[i];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    // Phase 1: minimize the sum of artificials.
    for (std::size_t j = 0; j < cols; ++j) {
      double r = 0.0;
      if (j >= n && j < n + m) r = 1.0;
      for (std::size_t i = 0; i < m; ++i)
        if (basis[i] >= n) r -= t[i][j];
      t[m][j] = r;
    }
    run(t, basis, n + m, m);
    if (t[m][cols - 1] < -1e-7) return {Status::infeasible, 0.0, {}, {}};

    // Drive any lingering artificials out of the basis when possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j)
        if (std::fabs(t[i][j]) > kEps) { enter = j; break; }
      if (enter < n) pivot(t, basis, i, enter);
      // else: redundant row, keep the artificial at zero level
    }

    // Phase 2: original objective; artificial columns may not re-enter.
    for (std::size_t j = 0; j < cols; ++j) {
      double r = (j < n) ? c[j] : 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double cb = (basis[i] < n) ? c[basis[i]] : 0.0;
        r -= cb * t[i][j];
      }
      t[m][j] = r;
    }
    bool bounded = run(t, basis, n, m);
    if (!bounded) return {Status::unbounded, 0.0, {}, {}};

    Result res;
    res.status = Status::optimal;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) res.x[basis[i]] = t[i][cols - 1];
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    // Reduced cost under the artificial unit column i equals -y_i.
    res.dual.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double y = -t[m][n + i];
      if (b[i] < 0.0) y = -y;  // row was negated on entry
      res.dual[i] = y;
    }
    return res;
  }

 private:
  static void pivot(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis,
                    std::size_t row, std::size_t col) {
    const std::size_t cols = t[0].size();
    double piv = t[row][col];
    for (std::size_t j = 0; j < cols; ++j) t[row][j] /= piv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == row) continue;
      double f = t[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  }

  // Returns false on unboundedness. Dantzig pricing normally; after a long
  // stall it switches to Bland's rule, which cannot cycle.
  static bool run(std::vector<std::vector<double>>& t, std::vector<std::size_t>& basis,
                  std::size_t enterable_cols, std::size_t m) {
    const std::size_t cols = t[0].size();
    const std::size_t rhs = cols - 1;
    const long bland_after = 2000 + static_cast<long>(20 * cols);
    for (long iter = 0; iter < 4000000; ++iter) {
      std::size_t enter = rhs;
      if (iter < bland_after) {
        double most = -kEps;
        for (std::size_t j = 0; j < enterable_cols; ++j)
          if (t[m][j] < most) { most = t[m][j]; enter = j; }
      } else {
        for (std::size_t j = 0; j < enterable_cols; ++j)
          if (t[m][j] < -kEps) { enter = j; break; }
      }
      if (enter == rhs) return true;

      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > kEps) {
          double ratio = t[i][rhs] / t[i][enter];
          if (ratio < best - kEps || (ratio < best + kEps && (leave == m || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;
      pivot(t, basis, leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit");
  }
};

}  // namespace randex::lp
