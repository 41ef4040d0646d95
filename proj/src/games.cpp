#include "maximin/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maximin {

namespace {

constexpr double kPivotEps = 1e-12;

// Simplex for  max 1'y  s.t.  C' y <= 1,  y >= 0  where C = B + 1 is F x A.
// Rows of the tableau are the A arm constraints; columns are the F function
// variables followed by A slacks. Returns y and the slack reduced costs,
// which are the optimal primal x with  C x >= 1.
struct DualSimplexResult {
  std::vector<double> y;  // size F
  std::vector<double> x;  // size A
  double objective = 0.0;
};

DualSimplexResult solve_normalized(const BinaryMatrix& b) {
  const std::size_t funcs = b.rows();
  const std::size_t arms = b.cols();
  const std::size_t cols = funcs + arms;

  Matrix<double> tab(arms, cols, 0.0);
  std::vector<double> rhs(arms, 1.0);
  std::vector<double> cost(cols, 0.0);  // reduced costs, objective row
  std::vector<std::size_t> basis(arms);

  for (std::size_t a = 0; a < arms; ++a) {
    for (std::size_t f = 0; f < funcs; ++f) tab(a, f) = 1.0 + b(f, a);
    tab(a, funcs + a) = 1.0;
    basis[a] = funcs + a;
  }
  for (std::size_t f = 0; f < funcs; ++f) cost[f] = 1.0;
  double objective = 0.0;

  // Dantzig pricing (largest reduced cost). After a run of degenerate pivots
  // switch to Bland's rule (least index entering, least basis index leaving
  // among ratio ties) until the objective moves again, which rules out
  // cycling.
  const std::size_t max_iter = 200 * (cols + arms) + 10000;
  const std::size_t stall_limit = 2 * arms + 10;
  std::size_t stalled = 0;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iter) throw PrecisionError("simplex iteration limit exceeded");
    const bool bland = stalled >= stall_limit;
    std::size_t enter = cols;
    double best_cost = kPivotEps;
    for (std::size_t j = 0; j < cols; ++j) {
      if (cost[j] > best_cost) {
        enter = j;
        if (bland) break;
        best_cost = cost[j];
      }
    }
    if (enter == cols) break;

    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < arms; ++r) {
      const double coef = tab(r, enter);
      if (coef > kPivotEps) best_ratio = std::min(best_ratio, rhs[r] / coef);
    }
    std::size_t leave = arms;
    for (std::size_t r = 0; r < arms; ++r) {
      const double coef = tab(r, enter);
      if (coef <= kPivotEps || rhs[r] / coef > best_ratio + kPivotEps) continue;
      if (leave == arms || basis[r] < basis[leave]) leave = r;
    }
    // C has positive entries, so every column is bounded by some row.
    if (leave == arms) throw PrecisionError("unbounded normalized game LP");

    const double piv = tab(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) tab(leave, j) /= piv;
    rhs[leave] /= piv;
    for (std::size_t r = 0; r < arms; ++r) {
      if (r == leave) continue;
      const double factor = tab(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) tab(r, j) -= factor * tab(leave, j);
      rhs[r] -= factor * rhs[leave];
    }
    const double factor = cost[enter];
    for (std::size_t j = 0; j < cols; ++j) cost[j] -= factor * tab(leave, j);
    const double gain = factor * rhs[leave];
    objective += gain;
    stalled = gain > kPivotEps ? 0 : stalled + 1;
    basis[leave] = enter;
  }

  DualSimplexResult out;
  out.y.assign(funcs, 0.0);
  for (std::size_t r = 0; r < arms; ++r) {
    if (basis[r] < funcs) out.y[basis[r]] = std::max(0.0, rhs[r]);
  }
  out.x.assign(arms, 0.0);
  for (std::size_t a = 0; a < arms; ++a) out.x[a] = std::max(0.0, -cost[funcs + a]);
  out.objective = objective;
  return out;
}

std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum <= 0.0) throw PrecisionError("degenerate LP certificate");
  for (double& x : v) x /= sum;
  return v;
}

double min_coverage(const BinaryMatrix& b, const std::vector<double>& p) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < b.rows(); ++f) {
    double cov = 0.0;
    for (std::size_t a = 0; a < b.cols(); ++a) cov += p[a] * b(f, a);
    worst = std::min(worst, cov);
  }
  return worst;
}

double max_dual_payoff(const BinaryMatrix& b, const std::vector<double>& lambda) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < b.cols(); ++a) {
    double v = 0.0;
    for (std::size_t f = 0; f < b.rows(); ++f) v += lambda[f] * b(f, a);
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

MaximinSolution solve_maximin(const BinaryMatrix& b, double tolerance) {
  if (b.rows() == 0 || b.cols() == 0) throw ParameterError("maximin matrix is empty");
  if (!(tolerance > 0.0)) throw ParameterError("tolerance must be positive");

  const DualSimplexResult lp = solve_normalized(b);
  // Value of the shifted game is 1/objective; shifting back subtracts 1.
  MaximinSolution sol;
  std::vector<double> p = normalized(lp.x);
  std::vector<double> lambda = normalized(lp.y);
  const double primal = min_coverage(b, p);
  const double dual = max_dual_payoff(b, lambda);
  if (dual - primal > 2.0 * tolerance) {
    throw PrecisionError("maximin duality gap exceeds tolerance");
  }
  sol.value = std::clamp(primal, 0.0, 1.0);
  sol.p_star = ArmDistribution(std::move(p));
  sol.dual = std::move(lambda);
  return sol;
}

GammaCertificate gamma(const FunctionClass& cls, double alpha, double tolerance) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0,1]");
  const BinaryMatrix b = gap_matrix(cls, alpha);
  MaximinSolution sol = solve_maximin(b, tolerance);

  GammaCertificate cert;
  cert.value = sol.value;
  cert.alpha = alpha;
  cert.tolerance = tolerance;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < b.rows(); ++f) {
    double cov = 0.0;
    for (std::size_t a = 0; a < b.cols(); ++a) cov += sol.p_star[a] * b(f, a);
    if (cov < worst) {
      worst = cov;
      cert.worst_function = f;
    }
  }
  cert.p_star = std::move(sol.p_star);
  cert.dual_weights = std::move(sol.dual);
  return cert;
}

bool verify_certificate(const FunctionClass& cls, double alpha, const GammaCertificate& cert) {
  if (cert.p_star.size() != cls.arms() || cert.dual_weights.size() != cls.functions()) {
    return false;
  }
  if (!cert.p_star.is_valid()) return false;
  if (!ArmDistribution::unchecked(cert.dual_weights).is_valid()) return false;
  if (!(alpha > 0.0)) return false;
  const BinaryMatrix b = gap_matrix(cls, alpha);
  const double tol = cert.tolerance;
  if (min_coverage(b, cert.p_star.probs()) < cert.value - tol) return false;
  if (max_dual_payoff(b, cert.dual_weights) > cert.value + tol) return false;
  return true;
}

}  // namespace maximin
