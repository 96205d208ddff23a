#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "eqkit/revealed.hpp"
#include "eqkit/rng.hpp"

namespace eqkit {

struct NoiseModel {
  enum class Kind { None, Gaussian, Uniform };
  Kind kind = Kind::None;
  double param = 0.0;  // sigma (std dev) for Gaussian, kappa for Uniform

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma);
  static NoiseModel uniform(double kappa);

  double sample(Rng& rng) const;
};

// Probes plus noisy observations y_t^i = x_t^i + w_t^i.
struct NoisyDataset {
  Eigen::MatrixXd probes;                     // T x m
  std::vector<Eigen::MatrixXd> observations;  // n blocks, T x m
  NoiseModel noise;

  int observations_count() const { return static_cast<int>(probes.rows()); }
  int probe_dim() const { return static_cast<int>(probes.cols()); }
  int agents() const { return static_cast<int>(observations.size()); }

  static NoisyDataset observe(const Dataset& clean, const NoiseModel& noise,
                              Rng& rng);
  Dataset as_dataset() const;  // reinterpret observations as actions
};

struct TestOutcome {
  double phi_star = 0.0;
  double tail_probability = 0.0;  // estimate of P(M >= phi_star)
  bool accept_h0 = false;         // accept iff tail_probability > gamma
  double gamma = 0.0;
};

// Synthetic malicious-agent potential game (authentication probes vs.
// detection-averse responders).
struct MaliciousGameSpec {
  int agents = 3;
  int probe_dim = 2;               // the interdependence term needs m = 2
  Eigen::VectorXd beta;            // noise-to-signal of authentication, > 0
  Eigen::VectorXd budget_mean;     // per agent
  Eigen::VectorXd budget_stddev;   // per agent
  double probe_lo = 1.0, probe_hi = 5.0;

  static MaliciousGameSpec paper_defaults();
  void validate() const;
};

// u^i = ln[x^i(1)x^i(2) / sum_{l,j} x^l(1)x^j(2)] + ln prod_j (1 +
// x^i(j)/beta(j)). Throws on nonpositive action components.
double malicious_utility(const Eigen::VectorXd& x_i,
                         const std::vector<Eigen::VectorXd>& x_others,
                         const Eigen::VectorXd& beta);

// Draws probes and budgets, then records the budget-constrained maximizer
// of the aggregate potential at each observation (projected gradient
// ascent).
Dataset generate_potential_game_data(const MaliciousGameSpec& spec, int T,
                                     Rng& rng);

// Smallest uniform slack phi making the noisy multi-agent system feasible;
// bisection over the lp feasibility oracle, absolute tolerance 1e-6.
double test_statistic_phi(const NoisyDataset& obs);

// Upper bisection bracket used by test_statistic_phi (always feasible).
double phi_upper_bound(const NoisyDataset& obs);

// Monte Carlo draws of M = max_{t,tau} sum_i |p_t'(w_t^i - w_tau^i)|.
Eigen::VectorXd sample_m(const Eigen::MatrixXd& probes, int agents,
                         const NoiseModel& noise, int samples, Rng& rng);

// Fraction of M draws >= phi_star.
double estimate_M_tail(const Eigen::MatrixXd& probes, int agents,
                       const NoiseModel& noise, double phi_star, int samples,
                       Rng& rng);

TestOutcome statistical_test(const NoisyDataset& obs, double gamma,
                             int mc_samples, Rng& rng);

struct SpsaConfig {
  double sigma = 0.1;        // gradient perturbation step
  double step = 0.2;         // update gain
  int iterations = 300;
  int cost_samples = 100;    // K
  std::uint64_t rng_seed = 1;
  double probe_floor = 0.01;

  void validate() const;
};

// Normal (non-rational) agents respond uniformly at random, independent of
// the probe.
struct NormalAgentModel {
  int agents = 3;
  double action_lo = 1.0, action_hi = 50.0;
};

struct SpsaContext {
  NormalAgentModel normal;
  NoiseModel noise;
  double gamma = 0.05;   // doubles as the alpha of the cost indicator
  int mc_samples = 10000;  // Monte Carlo size for the M distribution
};

/// Empirical Type-II cost: fraction of K noisy normal-agent panels the
// statistical test accepts. `rng` seeds the action draw and the K fixed
// noise realizations, so equal seeds give common random numbers.
double spsa_cost(const Eigen::MatrixXd& probes, const SpsaContext& ctx, int K,
                 Rng rng);

struct SpsaTrace {
  std::vector<Eigen::MatrixXd> probes;  // iterate per iteration (p_q)
  std::vector<double> costs;            // estimated Type-II cost per iteration
};

// Cost callback; the generator is passed by value so the two perturbed
// evaluations of one iteration share random numbers.
using SpsaCostFn = std::function<double(const Eigen::MatrixXd&, Rng)>;

SpsaTrace spsa_optimize(const Eigen::MatrixXd& initial_probes,
                        const SpsaConfig& cfg, const SpsaCostFn& cost);
SpsaTrace spsa_optimize(const Eigen::MatrixXd& initial_probes,
                        const SpsaConfig& cfg, const SpsaContext& ctx);

}  // namespace eqkit
