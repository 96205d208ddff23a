#include "eqkit/regret.hpp"

#include <cmath>
#include <stdexcept>

#include "eqkit/parallel.hpp"

namespace eqkit {

void LearnerConfig::validate() const {
  if (!(step_size > 0.0 && step_size < 1.0))
    throw std::invalid_argument("LearnerConfig: step_size must be in (0,1)");
  if (!(exploration > 0.0 && exploration < 1.0))
    throw std::invalid_argument("LearnerConfig: exploration must be in (0,1)");
}

double default_inertia(const NormalFormGame& game) {
  double span = 0.0;
  for (int k = 0; k < game.num_agents(); ++k)
    span = std::max(span, game.max_utility(k) - game.min_utility(k));
  return 1.1 * game.num_actions() * span;
}

double regret_bound(const NormalFormGame& game, double exploration) {
  double span = 0.0;
  for (int k = 0; k < game.num_agents(); ++k)
    span = std::max(span, game.max_utility(k) - game.min_utility(k));
  return span * game.num_actions() / exploration + span;
}

Eigen::VectorXd strategy_from_regret(const RegretState& state,
                                     const LearnerConfig& cfg,
                                     int num_actions, double mu) {
  if (!(mu > 0.0))
    throw std::invalid_argument("strategy_from_regret: inertia mu not set");
  const int prev = state.prev_action - 1;
  const double delta = cfg.exploration;
  Eigen::VectorXd p(num_actions);
  double rest = 0.0;
  for (int i = 0; i < num_actions; ++i) {
    if (i == prev) continue;
    const double pos = std::max(state.fused(prev, i), 0.0);
    p[i] = (1.0 - delta) * std::min(pos / mu, 1.0 / num_actions) +
           delta / num_actions;
    rest += p[i];
  }
  p[prev] = 1.0 - rest;
  if (p[prev] < delta / num_actions - 1e-12)
    throw std::invalid_argument(
        "strategy_from_regret: mu violates the inertia bound, distribution "
        "invalid");
  return p;
}

int sample_action(const Eigen::VectorXd& p, Rng& rng) {
  if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("sample_action: not a distribution");
  return rng.sample_discrete(p) + 1;
}

Eigen::MatrixXd instantaneous_regret(int action, double utility,
                                     const Eigen::VectorXd& strategy) {
  const int num_actions = static_cast<int>(strategy.size());
  const int a = action - 1;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(num_actions, num_actions);
  for (int i = 0; i < num_actions; ++i) {
    if (i == a) continue;
    f(i, a) = strategy[i] / strategy[a] * utility;  // had i been played as a
    f(a, i) = -utility;                             // forgo a for i
  }
  return f;
}

Eigen::MatrixXd regret_update(const RegretState& state,
                              const Eigen::MatrixXd& F, double eps) {
  return state.fused + eps * (F - state.fused);
}

Eigen::MatrixXd fuse_regrets(const std::vector<RegretState>& states,
                             const WeightMatrix& w, int agent) {
  const int num_actions = static_cast<int>(states[agent].individual.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(num_actions, num_actions);
  for (int l = 0; l < static_cast<int>(states.size()); ++l) {
    const double wl = w.entries(agent, l);
    if (wl != 0.0) out.noalias() += wl * states[l].individual;
  }
  return out;
}

double distance_to_ce(const std::vector<RegretState>& states) {
  double worst = 0.0;
  for (const auto& s : states) {
    const double norm = s.individual.cwiseMax(0.0).norm();
    worst = std::max(worst, norm);
  }
  return worst;
}

SimulationTrace run_simulation(const NormalFormGame& game,
                               const ConnectivityGraph& graph,
                               const Eigen::MatrixXd& C,
                               const LearnerConfig& cfg, int horizon,
                               int num_runs, const SimulationOptions& opts) {
  cfg.validate();
  if (horizon < 1 || num_runs < 1)
    throw std::invalid_argument("run_simulation: horizon and runs >= 1");
  const int num_agents = game.num_agents();
  const int num_actions = game.num_actions();
  const double mu = cfg.inertia > 0.0 ? cfg.inertia : default_inertia(game);
  // Eq. (9) calibrates mu against the undiscounted regret sum of Algorithm 1
  // Step 2, which is 1/eps times the eps-scaled state kept here; rescale so
  // the decision strategy sees the intended inertia.
  const double mu_scaled = cfg.step_size * mu;
  // Validate C against the graph, then fuse with the literal 1/4-style
  // neighbor weights of the worked example (W = I + C); the eps-scaled
  // W = I + eps*C leaves cooperation numerically invisible.
  WeightMatrix w = WeightMatrix::identity(num_agents);
  if (opts.variant == SimulationVariant::Diffusion) {
    build_weight_matrix(C, graph, cfg.step_size);
    w.entries += C;
  }

  Eigen::MatrixXd d_all(num_runs, horizon);
  std::vector<Eigen::VectorXd> final_z(num_runs);

  parallel_for(num_runs, [&](int run) {
    std::vector<Rng> rngs;
    rngs.reserve(num_agents);
    for (int k = 0; k < num_agents; ++k)
      rngs.emplace_back(cfg.rng_seed, static_cast<std::uint64_t>(run),
                        static_cast<std::uint64_t>(k));

    // n = 0: uniform initial strategy, zero regrets.
    const Eigen::VectorXd uniform =
        Eigen::VectorXd::Constant(num_actions, 1.0 / num_actions);
    std::vector<RegretState> states;
    Profile profile(num_agents);
    for (int k = 0; k < num_agents; ++k) {
      profile[k] = sample_action(uniform, rngs[k]);
      states.emplace_back(num_actions, profile[k]);
    }
    GlobalBehavior z(game, profile, cfg.step_size);

    std::vector<Eigen::VectorXd> strategies(num_agents);
    for (int n = 0; n < horizon; ++n) {
      // Step 1: decide from the fused beliefs.
      for (int k = 0; k < num_agents; ++k) {
        strategies[k] =
            strategy_from_regret(states[k], cfg, num_actions, mu_scaled);
        profile[k] = sample_action(strategies[k], rngs[k]);
      }
      const Eigen::VectorXd utilities = game.utility(profile);
      // Step 2: individual regret update.
      for (int k = 0; k < num_agents; ++k) {
        const Eigen::MatrixXd f =
            instantaneous_regret(profile[k], utilities[k], strategies[k]);
        states[k].individual = regret_update(states[k], f, cfg.step_size);
      }
      // Step 3: fuse across the social group.
      std::vector<Eigen::MatrixXd> fused(num_agents);
      if (opts.fuse_updated_individual) {
        for (int k = 0; k < num_agents; ++k)
          fused[k] = fuse_regrets(states, w, k);
      } else {
        // literal variant: combine the previous fused matrices
        for (int k = 0; k < num_agents; ++k) {
          fused[k].setZero(num_actions, num_actions);
          for (int l = 0; l < num_agents; ++l)
            if (w.entries(k, l) != 0.0)
              fused[k].noalias() += w.entries(k, l) * states[l].fused;
        }
      }
      for (int k = 0; k < num_agents; ++k) {
        states[k].fused = std::move(fused[k]);
        states[k].prev_action = profile[k];
      }
      z.update(game, profile);
      // Fig.-2 diagnostic: distance of the global behavior to the
      // correlated-equilibrium polytope (Theorem 1(ii)), reported per step.
      d_all(run, n) = std::max(0.0, ce_epsilon_violation(game, z.distribution()));
    }
    final_z[run] = z.distribution();
  });

  SimulationTrace trace;
  trace.mean_d = d_all.colwise().mean();
  trace.std_d.resize(horizon);
  for (int n = 0; n < horizon; ++n) {
    const double mean = trace.mean_d[n];
    trace.std_d[n] =
        std::sqrt((d_all.col(n).array() - mean).square().sum() /
                  std::max(1, num_runs - 1));
  }
  trace.final_z = std::move(final_z);
  return trace;
}

}  // namespace eqkit
