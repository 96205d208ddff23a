#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "eqkit/game.hpp"
#include "eqkit/rng.hpp"

namespace eqkit {

// Per-agent belief state: the individual regret matrix, its fused
// counterpart, and the previous action. Diagonals stay identically zero.
struct RegretState {
  Eigen::MatrixXd individual;  // A x A
  Eigen::MatrixXd fused;       // A x A
  int prev_action = 1;         // 1-based

  explicit RegretState(int num_actions, int first_action = 1)
      : individual(Eigen::MatrixXd::Zero(num_actions, num_actions)),
        fused(Eigen::MatrixXd::Zero(num_actions, num_actions)),
        prev_action(first_action) {}
};

struct LearnerConfig {
  double step_size = 0.01;      // adaptation rate, in (0,1)
  double exploration = 0.15;    // delta, in (0,1)
  double inertia = 0.0;         // mu; 0 means "derive from the game"
  std::uint64_t rng_seed = 1;

  void validate() const;
};

// mu default: 1.1 * A * (u_max - u_min) over all agents of the game.
double default_inertia(const NormalFormGame& game);

// Worst-case bound on |r(i,j)|: (u_max - u_min) * A / delta + |u_max -
// u_min|.
double regret_bound(const NormalFormGame& game, double exploration);

// Randomized decision strategy built from the fused regret row of the
// previous action. Every entry ends up >= delta/A and the vector sums to 1.
Eigen::VectorXd strategy_from_regret(const RegretState& state,
                                     const LearnerConfig& cfg,
                                     int num_actions, double mu);

// Inverse-CDF draw from a validated distribution; 1-based action index.
int sample_action(const Eigen::VectorXd& p, Rng& rng);

// Instantaneous regret matrix F: column `action` carries the importance
// ratio terms, row `action` the realized-utility terms, diagonal zero.
Eigen::MatrixXd instantaneous_regret(int action, double utility,
                                     const Eigen::VectorXd& strategy);

// individual <- fused + eps * (F - fused)
Eigen::MatrixXd regret_update(const RegretState& state,
                              const Eigen::MatrixXd& F, double eps);

// fused^k <- sum over closed neighborhood of w_kl * individual^l
Eigen::MatrixXd fuse_regrets(const std::vector<RegretState>& states,
                             const WeightMatrix& w, int agent);

// Eq.-(18) diagnostic: worst-agent Frobenius norm of the positive part of
// the individual regret matrices.
double distance_to_ce(const std::vector<RegretState>& states);

enum class SimulationVariant { Diffusion, Isolated };

struct SimulationTrace {
  Eigen::VectorXd mean_d;                // per step, averaged over runs
  Eigen::VectorXd std_d;                 // per step
  std::vector<Eigen::VectorXd> final_z;  // one distribution per run
};

struct SimulationOptions {
  SimulationVariant variant = SimulationVariant::Diffusion;
  // Follow the combiner over freshly updated individual matrices; when
  // false, reproduce the literal fuse-previous-fused variant.
  bool fuse_updated_individual = true;
};

SimulationTrace run_simulation(const NormalFormGame& game,
                               const ConnectivityGraph& graph,
                               const Eigen::MatrixXd& C,
                               const LearnerConfig& cfg, int horizon,
                               int num_runs, const SimulationOptions& opts);

}  // namespace eqkit
