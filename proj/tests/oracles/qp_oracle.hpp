#pragma once

// Dense projected-gradient (FISTA) solver for the soft-margin SVM dual
//   max  sum a - 1/2 a'Qa,  Q_ij = y_i y_j K_ij,  0 <= a <= C,  y'a = 0.
// Projection onto the feasible set is a bisection on the multiplier of the
// equality constraint.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct QpSolution {
  std::vector<double> alpha;
  double objective = 0.0;
  double bias = 0.0;
  int iterations = 0;
};

inline std::vector<double> project(const std::vector<double>& v, const std::vector<int>& y, double c) {
  const std::size_t n = v.size();
  auto clipped_sum = [&](double lambda) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += y[i] * std::clamp(v[i] - lambda * y[i], 0.0, c);
    return s;
  };
  // clipped_sum is non-increasing in lambda.
  double lo = -1.0, hi = 1.0;
  while (clipped_sum(lo) < 0.0) lo *= 2.0;
  while (clipped_sum(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (clipped_sum(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = 0.5 * (lo + hi);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(v[i] - lambda * y[i], 0.0, c);
  return out;
}

inline double dual_value(const std::vector<std::vector<double>>& q, const std::vector<double>& a) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < a.size(); ++j) quad += a[i] * a[j] * q[i][j];
  }
  return lin - 0.5 * quad;
}

/// `kernel` is the full Gram matrix.
inline QpSolution solve_dual(const std::vector<std::vector<double>>& kernel, const std::vector<int>& y, double c,
                             int max_iterations = 200000) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = y[i] * y[j] * kernel[i][j];

  // Lipschitz constant of the gradient via power iteration.
  std::vector<double> v(n, 1.0), w(n);
  double lipschitz = 1e-12;
  for (int it = 0; it < 500; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[i] += q[i][j] * v[j];
      norm += w[i] * w[i];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    lipschitz = norm;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  const double step = 1.0 / (lipschitz * 1.01);

  auto gradient = [&](const std::vector<double>& a) {
    std::vector<double> g(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i] -= q[i][j] * a[j];
    return g;
  };

  std::vector<double> a(n, 0.0), z = a;
  double t = 1.0;
  double best = dual_value(q, a);
  QpSolution sol;
  for (int it = 0; it < max_iterations; ++it) {
    const auto g = gradient(z);
    std::vector<double> ascent(n);
    for (std::size_t i = 0; i < n; ++i) ascent[i] = z[i] + step * g[i];
    std::vector<double> next = project(ascent, y, c);
    const double value = dual_value(q, next);
    if (value < best) {
      // A plain projected step that cannot improve: converged to rounding.
      if (t == 1.0) break;
      // Monotone restart.
      t = 1.0;
      z = a;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - a[i]);
      moved = std::max(moved, std::fabs(next[i] - a[i]));
    }
    a = std::move(next);
    t = t_next;
    const double gain = value - best;
    best = value;
    sol.iterations = it + 1;
    if (moved < 1e-13 && gain < 1e-15) break;
  }
  sol.alpha = a;
  sol.objective = best;

  // Bias from margin multipliers, midpoint of the feasible interval otherwise.
  const auto g = gradient(a);  // g_i = 1 - y_i f_i(x) without bias
  double sum = 0.0;
  int free_count = 0;
  double lo = -1e300, hi = 1e300;
  const double eps = 1e-7 * c;
  for (std::size_t i = 0; i < n; ++i) {
    const double yf = 1.0 - g[i];            // y_i * sum_j a_j y_j K_ij
    const double b_i = y[i] * (1.0 - yf);    // b making y_i f(x_i) == 1
    if (a[i] > eps && a[i] < c - eps) {
      sum += b_i;
      ++free_count;
    } else if ((a[i] <= eps) == (y[i] > 0)) {
      lo = std::max(lo, b_i);
    } else {
      hi = std::min(hi, b_i);
    }
  }
  sol.bias = free_count > 0 ? sum / free_count : 0.5 * (lo + hi);
  return sol;
}

}  // namespace oracle
