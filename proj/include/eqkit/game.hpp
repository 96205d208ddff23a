#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace eqkit {

using Profile = std::vector<int>;  // one action per agent, 1-based

// Finite normal-form game with a common action set: K agents, A actions
// each. Payoffs are stored densely, indexed by mixed-radix profile encoding.
class NormalFormGame {
 public:
  NormalFormGame(int num_agents, int num_actions);

  int num_agents() const { return num_agents_; }
  int num_actions() const { return num_actions_; }
  int num_profiles() const { return num_profiles_; }

  // Mixed-radix encoding of a profile (actions 1..A) as 0..A^K-1.
  int profile_index(const Profile& profile) const;
  Profile profile_from_index(int index) const;

  void set_payoff(const Profile& profile, const Eigen::VectorXd& utilities);
  // Realized payoff tuple, one utility per agent.
  Eigen::VectorXd utility(const Profile& profile) const;
  double utility(int agent, const Profile& profile) const;

  double max_utility(int agent) const;
  double min_utility(int agent) const;

  // Eq-(1) check for one unordered agent pair: swapping the two agents'
  // actions in any profile swaps their payoffs.
  bool symmetric_pair(int agent_a, int agent_b, double tol = 1e-9) const;
  // All unordered pairs.
  bool symmetric(double tol = 1e-9) const;

  bool symmetric_flag() const { return symmetric_flag_; }
  void set_symmetric_flag(bool flag) { symmetric_flag_ = flag; }

  // Throws if any profile payoff is unset.
  void validate() const;

 private:
  int num_agents_;
  int num_actions_;
  int num_profiles_;
  Eigen::MatrixXd payoffs_;  // num_profiles x K
  std::vector<bool> defined_;
  bool symmetric_flag_ = false;
};

// Simple undirected graph over agents: no self loops, no duplicate edges.
class ConnectivityGraph {
 public:
  explicit ConnectivityGraph(int num_agents) : num_agents_(num_agents) {}

  int num_agents() const { return num_agents_; }
  void add_edge(int k, int l);
  bool has_edge(int k, int l) const;
  std::vector<int> neighbors(int k) const;         // open neighborhood
  std::vector<int> closed_neighbors(int k) const;  // N^k united with {k}
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  int num_agents_;
  std::vector<std::pair<int, int>> edges_;  // stored with first < second
};

// Row-stochastic diffusion weight matrix W = I + eps*C.
struct WeightMatrix {
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(entries.rows()); }
  static WeightMatrix identity(int k) {
    return WeightMatrix{Eigen::MatrixXd::Identity(k, k)};
  }
};

// Validates C against the graph support conditions and returns W = I + eps*C.
// Throws std::invalid_argument naming the violated condition.
WeightMatrix build_weight_matrix(const Eigen::MatrixXd& C,
                                 const ConnectivityGraph& graph, double eps);

// Discounted empirical frequency of joint action profiles.
class GlobalBehavior {
 public:
  GlobalBehavior(const NormalFormGame& game, const Profile& first_profile,
                 double step_size);

  const Eigen::VectorXd& distribution() const { return z_; }
  double step_size() const { return step_size_; }

  // z' = z + eps * (e_profile - z)
  GlobalBehavior updated(const NormalFormGame& game,
                         const Profile& profile) const;
  void update(const NormalFormGame& game, const Profile& profile);

  void renormalize() { z_ /= z_.sum(); }

 private:
  GlobalBehavior() = default;
  Eigen::VectorXd z_;
  double step_size_ = 0.0;
};

// Worst correlated-equilibrium constraint violation of a joint distribution:
// max over (agent, recommended i, deviation j) of the expected gain from
// deviating. The distribution lies in the epsilon-equilibria set iff the
// returned value is <= epsilon.
double ce_epsilon_violation(const NormalFormGame& game,
                            const Eigen::VectorXd& pi);

// Brute-force pure Nash enumeration for small games (test oracle scale).
std::vector<Profile> pure_nash_profiles(const NormalFormGame& game,
                                        double tol = 1e-12);

}  // namespace eqkit
