#pragma once

#include <cstddef>
#include <vector>

#include "maximin/core.hpp"

namespace maximin {

inline constexpr double kDefaultTolerance = 1e-9;

struct MaximinSolution {
  double value = 0.0;
  // Row player's (arm chooser's) optimal mixed strategy over columns.
  ArmDistribution p_star;
  // Minimizer's optimal mixture over rows.
  std::vector<double> dual;
};

// Value of max_p min_f sum_a p(a) B[f][a] together with both certificates,
// from the LP  max t  s.t.  B p >= t 1,  sum p = 1,  p >= 0.
//
// Solved as the equivalent normalized game on B + 1 (strictly positive, so
// its value is >= 1) by a dense tableau simplex with Dantzig pricing and a Bland fallback; the dual
// tableau starts feasible at the slack basis, so no phase one is needed.
// Throws ParameterError on empty B or tolerance <= 0.
MaximinSolution solve_maximin(const BinaryMatrix& b, double tolerance = kDefaultTolerance);

struct GammaCertificate {
  double value = 0.0;
  ArmDistribution p_star;
  std::size_t worst_function = 0;
  std::vector<double> dual_weights;
  double alpha = 0.0;
  double tolerance = kDefaultTolerance;
};

// Generalized maximin volume of cls at accuracy alpha in (0,1].
GammaCertificate gamma(const FunctionClass& cls, double alpha,
                       double tolerance = kDefaultTolerance);

// Recomputes both certificate inequalities at cert.tolerance; never solves.
bool verify_certificate(const FunctionClass& cls, double alpha, const GammaCertificate& cert);

}  // namespace maximin
