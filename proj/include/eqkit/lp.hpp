#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>

namespace eqkit {

// Dense inequality system  G x <= h  with optional per-variable lower bounds
// (-inf marks a free variable). Hosts every Afriat-style feasibility test.
struct LinearSystem {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::VectorXd lower;  // size = cols(G); -inf for free variables

  LinearSystem() = default;
  LinearSystem(int rows, int cols)
      : G(Eigen::MatrixXd::Zero(rows, cols)),
        h(Eigen::VectorXd::Zero(rows)),
        lower(Eigen::VectorXd::Constant(
            cols, -std::numeric_limits<double>::infinity())) {}

  int rows() const { return static_cast<int>(G.rows()); }
  int cols() const { return static_cast<int>(G.cols()); }
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd point;  // valid when feasible

  explicit operator bool() const { return feasible; }
};

inline constexpr double kFeasTol = 1e-7;
inline constexpr double kPivotTol = 1e-9;
inline constexpr long kPivotCap = 1000000;

// Phase-1 simplex (single artificial column, Dantzig pricing with a Bland
// anti-cycling fallback). Returns a point satisfying G x <= h + kFeasTol
// when the system is feasible.
FeasibilityResult feasible(const LinearSystem& sys);

}  // namespace eqkit
