#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "eqkit/lp.hpp"

namespace eqkit {

// Time series of probes and per-agent actions. Probe entries are strictly
// positive; the budget of agent i at time t is the observed expenditure
// p_t' x_t^i.
struct Dataset {
  Eigen::MatrixXd probes;                // T x m
  std::vector<Eigen::MatrixXd> actions;  // one T x m block per agent

  int observations() const { return static_cast<int>(probes.rows()); }
  int probe_dim() const { return static_cast<int>(probes.cols()); }
  int agents() const { return static_cast<int>(actions.size()); }

  void validate() const;  // strict probe positivity, dims, T >= 1

  Dataset agent_slice(int i) const;  // single-agent view as its own dataset
};

struct AfriatCertificate {
  Eigen::VectorXd u;       // one utility level per observation
  Eigen::VectorXd lambda;  // one multiplier per observation, >= 1

  // Re-validates the Afriat inequalities on the dataset.
  bool valid_for(const Dataset& data, double tol = kFeasTol) const;
};

struct PotentialCertificate {
  Eigen::VectorXd v;       // potential level per observation
  Eigen::MatrixXd lambda;  // T x n multipliers, >= 1

  bool valid_for(const Dataset& data, double tol = kFeasTol) const;
};

// Utility-maximization test (single agent): feasibility of the Afriat
// inequalities with lambda >= 1.
std::optional<AfriatCertificate> afriat_test(const Dataset& data);

struct GarpResult {
  bool pass = true;
  std::vector<int> cycle;  // violating cycle of observation indices (0-based)
};

// Direct relation t R0 tau iff p_t'x_t >= p_t'x_tau; transitive closure via
// Warshall; fails on a revealed cycle with a strictly-cheaper edge.
GarpResult garp_check(const Dataset& data);

// Lower envelope of the certificate hyperplanes: min_t u_t + lambda_t *
// p_t'(x - x_t).
double reconstruct_utility(const AfriatCertificate& cert, const Dataset& data,
                           const Eigen::VectorXd& x);

// Multi-agent test: feasibility of v_tau - v_t - sum_i lambda_t^i p_t'
// (x_tau^i - x_t^i) <= 0 with lambda >= 1.
std::optional<PotentialCertificate> nash_rationality_test(const Dataset& data);

// min_t v_t + sum_i lambda_t^i p_t'(x^i - x_t^i)
double reconstruct_potential(const PotentialCertificate& cert,
                             const Dataset& data,
                             const std::vector<Eigen::VectorXd>& x);

struct MrsResult {
  double value = 0.0;
  int active_t = 0;        // hyperplane the envelope attains its minimum at
  bool non_unique = false; // two hyperplanes active within 1e-9
};

// Marginal rate of substitution of the reconstructed potential at a joint
// point, for agent i and probe dimensions (j, k): the probe-component ratio
// of the active hyperplane.
MrsResult marginal_rate_of_substitution(const PotentialCertificate& cert,
                                        const Dataset& data,
                                        const std::vector<Eigen::VectorXd>& x,
                                        int agent, int dim_j, int dim_k);

// The LP behind afriat_test / nash_rationality_test, exposed for the
// noise-slack variant: each row gets an extra -sum_i lambda_t^i * phi term.
LinearSystem nash_system(const Dataset& data, double phi = 0.0);

// Same system built from raw blocks (noisy observations may go negative, so
// no action-sign validation). Probe positivity is still required.
LinearSystem afriat_style_system(const Eigen::MatrixXd& probes,
                                 const std::vector<Eigen::MatrixXd>& blocks,
                                 double phi);

}  // namespace eqkit
