#include "eqkit/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqkit {
namespace {

struct StandardForm {
  Eigen::MatrixXd A;       // m x N, variables all >= 0
  Eigen::VectorXd b;
  // Mapping back to the original variables: x_j = lower_j + y_{pos[j]} for
  // bounded variables, x_j = y_{pos[j]} - y_{neg[j]} for free ones.
  std::vector<int> pos, neg;
};

StandardForm to_standard(const LinearSystem& sys) {
  const int m = sys.rows();
  const int n = sys.cols();
  if (sys.h.size() != m || sys.lower.size() != n)
    throw std::invalid_argument("LinearSystem: inconsistent dimensions");
  if (!sys.G.allFinite() || !sys.h.allFinite())
    throw std::invalid_argument("LinearSystem: non-finite entries");

  int cols = 0;
  StandardForm sf;
  sf.pos.assign(n, -1);
  sf.neg.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    sf.pos[j] = cols++;
    if (!std::isfinite(sys.lower[j])) sf.neg[j] = cols++;
  }
  sf.A.setZero(m, cols);
  sf.b = sys.h;
  for (int j = 0; j < n; ++j) {
    sf.A.col(sf.pos[j]) = sys.G.col(j);
    if (sf.neg[j] >= 0) {
      sf.A.col(sf.neg[j]) = -sys.G.col(j);
    } else {
      sf.b.noalias() -= sys.G.col(j) * sys.lower[j];
    }
  }
  return sf;
}

}  // namespace

FeasibilityResult feasible(const LinearSystem& sys) {
  const StandardForm sf = to_standard(sys);
  const int m = static_cast<int>(sf.A.rows());
  const int nstruct = static_cast<int>(sf.A.cols());

  FeasibilityResult res;
  auto recover = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd x(sys.cols());
    for (int j = 0; j < sys.cols(); ++j) {
      if (sf.neg[j] >= 0)
        x[j] = y[sf.pos[j]] - y[sf.neg[j]];
      else
        x[j] = sys.lower[j] + y[sf.pos[j]];
    }
    return x;
  };

  if (m == 0 || sf.b.minCoeff() >= 0.0) {
    res.feasible = true;
    res.point = recover(Eigen::VectorXd::Zero(nstruct));
    return res;
  }

  // Tableau for min z subject to A y - z 1 + s = b, y, z, s >= 0.
  // Columns: [structural | artificial z | slacks | rhs]; row 0 is the
  // objective (reduced costs, with -objective value in the rhs cell).
  const int art = nstruct;
  const int slack0 = nstruct + 1;
  const int ncols = nstruct + 1 + m + 1;
  const int rhs = ncols - 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, ncols);
  T.block(1, 0, m, nstruct) = sf.A;
  T.col(art).tail(m).setConstant(-1.0);
  T.block(1, slack0, m, m).setIdentity();
  T.col(rhs).tail(m) = sf.b;
  T(0, art) = 1.0;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = slack0 + i;

  auto pivot = [&](int r, int c) {
    const double piv = T(r + 1, c);
    Eigen::RowVectorXd prow = T.row(r + 1) / piv;
    Eigen::VectorXd col = T.col(c);
    T.noalias() -= col * prow;
    T.row(r + 1) = prow;
    T.col(c).setZero();
    T(r + 1, c) = 1.0;
    basis[r] = c;
  };

  // Driving pivot: bring the artificial in on the most violated row.
  int worst = 0;
  sf.b.minCoeff(&worst);
  pivot(worst, art);

  long iters = 0;
  long stall = 0;
  bool bland = false;
  double last_obj = -T(0, rhs);
  while (true) {
    if (++iters > kPivotCap)
      throw std::runtime_error(
          "lp: pivot cap exceeded (" + std::to_string(kPivotCap) +
          " iterations) without resolving feasibility");

    // Entering column.
    int enter = -1;
    if (bland) {
      for (int c = 0; c < ncols - 1; ++c)
        if (T(0, c) < -kPivotTol) {
          enter = c;
          break;
        }
    } else {
      double best = -kPivotTol;
      for (int c = 0; c < ncols - 1; ++c)
        if (T(0, c) < best) {
          best = T(0, c);
          enter = c;
        }
    }
    if (enter < 0) break;  // optimal

    // Ratio test; ties broken towards the smallest basis label.
    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      const double a = T(r + 1, enter);
      if (a <= kPivotTol) continue;
      const double ratio = T(r + 1, rhs) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) break;  // unbounded in a descent direction: z -> 0

    pivot(leave, enter);
    if (basis[leave] == art) { /* artificial re-entered; keep going */
    }

    const double obj = -T(0, rhs);
    if (obj <= kFeasTol) break;  // already feasible enough
    if (last_obj - obj < 1e-13) {
      if (++stall > 200) bland = true;  // anti-cycling fallback
    } else {
      stall = 0;
    }
    last_obj = obj;
  }

  const double zval = -T(0, rhs);
  if (zval > kFeasTol) return res;  // infeasible

  Eigen::VectorXd y = Eigen::VectorXd::Zero(nstruct);
  for (int r = 0; r < m; ++r)
    if (basis[r] < nstruct) y[basis[r]] = T(r + 1, rhs);
  res.feasible = true;
  res.point = recover(y);
  return res;
}

}  // namespace eqkit
