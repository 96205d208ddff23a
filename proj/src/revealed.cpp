#include "eqkit/revealed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eqkit {

void Dataset::validate() const {
  if (observations() < 1) throw std::invalid_argument("Dataset: T >= 1 required");
  if (agents() < 1) throw std::invalid_argument("Dataset: n >= 1 required");
  if (probes.minCoeff() <= 0.0)
    throw std::invalid_argument("Dataset: probe entries must be strictly positive");
  for (const auto& x : actions) {
    if (x.rows() != probes.rows() || x.cols() != probes.cols())
      throw std::invalid_argument("Dataset: action block dimensions mismatch");
    if (x.minCoeff() < 0.0)
      throw std::invalid_argument("Dataset: actions must be nonnegative");
  }
}

Dataset Dataset::agent_slice(int i) const {
  Dataset out;
  out.probes = probes;
  out.actions = {actions.at(i)};
  return out;
}

namespace {

// c^i(t, tau) = p_t' (x_tau^i - x_t^i)
Eigen::MatrixXd cross_expenditure(const Eigen::MatrixXd& probes,
                                  const Eigen::MatrixXd& x) {
  // e(t, tau) = p_t' x_tau; the difference matrix follows by subtracting
  // the diagonal from each row.
  Eigen::MatrixXd e = probes * x.transpose();
  return e.colwise() - e.diagonal();
}

}  // namespace

LinearSystem afriat_style_system(const Eigen::MatrixXd& probes,
                                 const std::vector<Eigen::MatrixXd>& blocks,
                                 double phi) {
  if (probes.minCoeff() <= 0.0)
    throw std::invalid_argument("probes must be strictly positive");
  const int tt = static_cast<int>(probes.rows());
  const int n = static_cast<int>(blocks.size());
  std::vector<Eigen::MatrixXd> c(n);
  for (int i = 0; i < n; ++i) c[i] = cross_expenditure(probes, blocks[i]);

  // Variables: v_1..v_T (free), then lambda_t^i (>= 1) grouped by t.
  LinearSystem sys(tt * (tt - 1), tt + tt * n);
  for (int j = 0; j < tt * n; ++j) sys.lower[tt + j] = 1.0;
  int row = 0;
  for (int t = 0; t < tt; ++t)
    for (int tau = 0; tau < tt; ++tau) {
      if (t == tau) continue;
      sys.G(row, tau) += 1.0;
      sys.G(row, t) -= 1.0;
      for (int i = 0; i < n; ++i)
        sys.G(row, tt + t * n + i) = -(c[i](t, tau) + phi);
      ++row;
    }
  return sys;
}

LinearSystem nash_system(const Dataset& data, double phi) {
  data.validate();
  return afriat_style_system(data.probes, data.actions, phi);
}

bool AfriatCertificate::valid_for(const Dataset& data, double tol) const {
  const int tt = data.observations();
  if (u.size() != tt || lambda.size() != tt || lambda.minCoeff() < 1.0 - tol)
    return false;
  const Eigen::MatrixXd c = cross_expenditure(data.probes, data.actions[0]);
  for (int t = 0; t < tt; ++t)
    for (int tau = 0; tau < tt; ++tau)
      if (u[tau] - u[t] - lambda[t] * c(t, tau) > tol) return false;
  return true;
}

bool PotentialCertificate::valid_for(const Dataset& data, double tol) const {
  const int tt = data.observations();
  const int n = data.agents();
  if (v.size() != tt || lambda.rows() != tt || lambda.cols() != n ||
      lambda.minCoeff() < 1.0 - tol)
    return false;
  std::vector<Eigen::MatrixXd> c(n);
  for (int i = 0; i < n; ++i)
    c[i] = cross_expenditure(data.probes, data.actions[i]);
  for (int t = 0; t < tt; ++t)
    for (int tau = 0; tau < tt; ++tau) {
      double lhs = v[tau] - v[t];
      for (int i = 0; i < n; ++i) lhs -= lambda(t, i) * c[i](t, tau);
      if (lhs > tol) return false;
    }
  return true;
}

std::optional<AfriatCertificate> afriat_test(const Dataset& data) {
  data.validate();
  if (data.agents() != 1)
    throw std::invalid_argument("afriat_test: single-agent dataset required");
  const auto res = feasible(nash_system(data));
  if (!res) return std::nullopt;
  const int tt = data.observations();
  AfriatCertificate cert;
  cert.u = res.point.head(tt);
  cert.lambda = res.point.tail(tt);
  return cert;
}

std::optional<PotentialCertificate> nash_rationality_test(const Dataset& data) {
  data.validate();
  const auto res = feasible(nash_system(data));
  if (!res) return std::nullopt;
  const int tt = data.observations();
  const int n = data.agents();
  PotentialCertificate cert;
  cert.v = res.point.head(tt);
  cert.lambda.resize(tt, n);
  for (int t = 0; t < tt; ++t)
    for (int i = 0; i < n; ++i) cert.lambda(t, i) = res.point[tt + t * n + i];
  return cert;
}

GarpResult garp_check(const Dataset& data) {
  data.validate();
  if (data.agents() != 1)
    throw std::invalid_argument("garp_check: single-agent dataset required");
  const int tt = data.observations();
  const Eigen::MatrixXd e = data.probes * data.actions[0].transpose();

  // direct(t, tau): x_t directly revealed preferred to x_tau
  std::vector<std::vector<bool>> reach(tt, std::vector<bool>(tt, false));
  std::vector<std::vector<int>> via(tt, std::vector<int>(tt, -1));
  for (int t = 0; t < tt; ++t)
    for (int tau = 0; tau < tt; ++tau)
      reach[t][tau] = e(t, t) >= e(t, tau);

  // Warshall transitive closure, recording midpoints for cycle recovery.
  for (int k = 0; k < tt; ++k)
    for (int t = 0; t < tt; ++t) {
      if (!reach[t][k]) continue;
      for (int tau = 0; tau < tt; ++tau)
        if (reach[k][tau] && !reach[t][tau]) {
          reach[t][tau] = true;
          via[t][tau] = k;
        }
    }

  auto expand_path = [&](auto&& self, int a, int b,
                         std::vector<int>& out) -> void {
    const int k = via[a][b];
    if (k < 0) {
      out.push_back(b);
      return;
    }
    self(self, a, k, out);
    self(self, k, b, out);
  };

  for (int t = 0; t < tt; ++t)
    for (int tau = 0; tau < tt; ++tau)
      if (reach[t][tau] && e(tau, tau) > e(tau, t)) {
        // x_t R x_tau yet x_tau was strictly cheaper when x_tau was chosen:
        // revealed-preference cycle t -> ... -> tau -> t.
        GarpResult fail;
        fail.pass = false;
        fail.cycle.push_back(t);
        expand_path(expand_path, t, tau, fail.cycle);
        fail.cycle.push_back(t);
        return fail;
      }
  return {};
}

double reconstruct_utility(const AfriatCertificate& cert, const Dataset& data,
                           const Eigen::VectorXd& x) {
  const int tt = data.observations();
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < tt; ++t) {
    const double val =
        cert.u[t] +
        cert.lambda[t] *
            data.probes.row(t).dot(x.transpose() - data.actions[0].row(t));
    best = std::min(best, val);
  }
  return best;
}

double reconstruct_potential(const PotentialCertificate& cert,
                             const Dataset& data,
                             const std::vector<Eigen::VectorXd>& x) {
  const int tt = data.observations();
  const int n = data.agents();
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < tt; ++t) {
    double val = cert.v[t];
    for (int i = 0; i < n; ++i)
      val += cert.lambda(t, i) *
             data.probes.row(t).dot(x[i].transpose() - data.actions[i].row(t));
    best = std::min(best, val);
  }
  return best;
}

MrsResult marginal_rate_of_substitution(const PotentialCertificate& cert,
                                        const Dataset& data,
                                        const std::vector<Eigen::VectorXd>& x,
                                        int agent, int dim_j, int dim_k) {
  const int tt = data.observations();
  const int n = data.agents();
  Eigen::VectorXd vals(tt);
  for (int t = 0; t < tt; ++t) {
    double val = cert.v[t];
    for (int i = 0; i < n; ++i)
      val += cert.lambda(t, i) *
             data.probes.row(t).dot(x[i].transpose() - data.actions[i].row(t));
    vals[t] = val;
  }
  int active = 0;
  vals.minCoeff(&active);
  // Smallest index wins; flag a kink when a second hyperplane ties.
  for (int t = 0; t < tt; ++t)
    if (vals[t] <= vals[active] + 1e-9 && t < active) active = t;
  MrsResult out;
  out.active_t = active;
  for (int t = 0; t < tt; ++t)
    if (t != active && vals[t] <= vals[active] + 1e-9) out.non_unique = true;
  (void)agent;  // the lambda factor cancels in the ratio
  out.value = data.probes(active, dim_j) / data.probes(active, dim_k);
  return out;
}

}  // namespace eqkit
