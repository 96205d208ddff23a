#include "eqkit/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eqkit {

NormalFormGame::NormalFormGame(int num_agents, int num_actions)
    : num_agents_(num_agents), num_actions_(num_actions) {
  if (num_agents < 1 || num_actions < 1)
    throw std::invalid_argument("NormalFormGame: K >= 1 and A >= 1 required");
  double count = std::pow(num_actions, num_agents);
  if (count > 1e7)
    throw std::invalid_argument("NormalFormGame: A^K too large");
  num_profiles_ = static_cast<int>(count + 0.5);
  payoffs_.setZero(num_profiles_, num_agents_);
  defined_.assign(num_profiles_, false);
}

int NormalFormGame::profile_index(const Profile& profile) const {
  if (static_cast<int>(profile.size()) != num_agents_)
    throw std::invalid_argument("profile: wrong number of agents");
  int idx = 0;
  for (int k = 0; k < num_agents_; ++k) {
    const int a = profile[k];
    if (a < 1 || a > num_actions_)
      throw std::invalid_argument("profile: action index out of range 1..A");
    idx = idx * num_actions_ + (a - 1);
  }
  return idx;
}

Profile NormalFormGame::profile_from_index(int index) const {
  Profile p(num_agents_);
  for (int k = num_agents_ - 1; k >= 0; --k) {
    p[k] = index % num_actions_ + 1;
    index /= num_actions_;
  }
  return p;
}

void NormalFormGame::set_payoff(const Profile& profile,
                                const Eigen::VectorXd& utilities) {
  if (utilities.size() != num_agents_)
    throw std::invalid_argument("set_payoff: one utility per agent required");
  const int idx = profile_index(profile);
  payoffs_.row(idx) = utilities;
  defined_[idx] = true;
}

Eigen::VectorXd NormalFormGame::utility(const Profile& profile) const {
  return payoffs_.row(profile_index(profile));
}

double NormalFormGame::utility(int agent, const Profile& profile) const {
  return payoffs_(profile_index(profile), agent);
}

double NormalFormGame::max_utility(int agent) const {
  return payoffs_.col(agent).maxCoeff();
}

double NormalFormGame::min_utility(int agent) const {
  return payoffs_.col(agent).minCoeff();
}

bool NormalFormGame::symmetric_pair(int a, int b, double tol) const {
  for (int idx = 0; idx < num_profiles_; ++idx) {
    Profile p = profile_from_index(idx);
    Profile q = p;
    std::swap(q[a], q[b]);
    const int jdx = profile_index(q);
    if (std::abs(payoffs_(idx, a) - payoffs_(jdx, b)) > tol) return false;
    if (std::abs(payoffs_(idx, b) - payoffs_(jdx, a)) > tol) return false;
  }
  return true;
}

bool NormalFormGame::symmetric(double tol) const {
  for (int a = 0; a < num_agents_; ++a)
    for (int b = a + 1; b < num_agents_; ++b)
      if (!symmetric_pair(a, b, tol)) return false;
  return true;
}

void NormalFormGame::validate() const {
  for (int idx = 0; idx < num_profiles_; ++idx)
    if (!defined_[idx])
      throw std::invalid_argument(
          "NormalFormGame: payoff undefined for some joint profile");
  if (symmetric_flag_ && !symmetric())
    throw std::invalid_argument(
        "NormalFormGame: symmetric flag set but Eq.-(1) symmetry fails");
}

void ConnectivityGraph::add_edge(int k, int l) {
  if (k == l) throw std::invalid_argument("ConnectivityGraph: self loop");
  if (k < 0 || l < 0 || k >= num_agents_ || l >= num_agents_)
    throw std::invalid_argument("ConnectivityGraph: agent index out of range");
  if (has_edge(k, l))
    throw std::invalid_argument("ConnectivityGraph: duplicate edge");
  edges_.emplace_back(std::min(k, l), std::max(k, l));
}

bool ConnectivityGraph::has_edge(int k, int l) const {
  const auto e = std::make_pair(std::min(k, l), std::max(k, l));
  return std::find(edges_.begin(), edges_.end(), e) != edges_.end();
}

std::vector<int> ConnectivityGraph::neighbors(int k) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges_) {
    if (a == k) out.push_back(b);
    if (b == k) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> ConnectivityGraph::closed_neighbors(int k) const {
  auto out = neighbors(k);
  out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

WeightMatrix build_weight_matrix(const Eigen::MatrixXd& C,
                                 const ConnectivityGraph& graph, double eps) {
  const int k = graph.num_agents();
  const double tol = 1e-9;
  if (C.rows() != k || C.cols() != k)
    throw std::invalid_argument("build_weight_matrix: C must be K x K");
  if (!(eps > 0.0))
    throw std::invalid_argument("build_weight_matrix: eps must be positive");
  if (!C.isApprox(C.transpose(), tol))
    throw std::invalid_argument("build_weight_matrix: C not symmetric");
  for (int i = 0; i < k; ++i)
    if (std::abs(C.row(i).sum()) > tol)
      throw std::invalid_argument("build_weight_matrix: row sums of C not 0");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      if (C(i, j) < -tol || C(i, j) > 1.0 + tol)
        throw std::invalid_argument(
            "build_weight_matrix: off-diagonal entries must lie in [0, 1]");
      const bool positive = C(i, j) > tol;
      if (positive != graph.has_edge(i, j))
        throw std::invalid_argument(
            "build_weight_matrix: support condition c_kl > 0 iff (k,l) edge "
            "violated");
    }
  for (int i = 0; i < k; ++i)
    if (eps * std::abs(C(i, i)) > 1.0 + tol)
      throw std::invalid_argument(
          "build_weight_matrix: eps*|c_kk| > 1 makes W lose nonnegativity");

  WeightMatrix w{Eigen::MatrixXd::Identity(k, k) + eps * C};
  return w;
}

GlobalBehavior::GlobalBehavior(const NormalFormGame& game,
                               const Profile& first_profile, double step_size)
    : step_size_(step_size) {
  if (!(step_size > 0.0 && step_size < 1.0))
    throw std::invalid_argument("GlobalBehavior: step size must be in (0,1)");
  z_.setZero(game.num_profiles());
  z_[game.profile_index(first_profile)] = 1.0;
}

void GlobalBehavior::update(const NormalFormGame& game, const Profile& p) {
  const int idx = game.profile_index(p);
  z_ *= (1.0 - step_size_);
  z_[idx] += step_size_;
}

GlobalBehavior GlobalBehavior::updated(const NormalFormGame& game,
                                       const Profile& p) const {
  GlobalBehavior out = *this;
  out.update(game, p);
  return out;
}

double ce_epsilon_violation(const NormalFormGame& game,
                            const Eigen::VectorXd& pi) {
  if (pi.size() != game.num_profiles())
    throw std::invalid_argument("ce_epsilon_violation: distribution size");
  const int kk = game.num_agents();
  const int aa = game.num_actions();
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kk; ++k) {
    // gain(i, j) = sum over profiles with a^k = i of pi(a) * [u^k(j, a^-k) -
    // u^k(i, a^-k)]
    Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(aa, aa);
    for (int idx = 0; idx < game.num_profiles(); ++idx) {
      const double mass = pi[idx];
      if (mass == 0.0) continue;
      Profile p = game.profile_from_index(idx);
      const int i = p[k] - 1;
      const double base = game.utility(k, p);
      for (int j = 0; j < aa; ++j) {
        if (j == i) continue;
        Profile q = p;
        q[k] = j + 1;
        gain(i, j) += mass * (game.utility(k, q) - base);
      }
    }
    for (int i = 0; i < aa; ++i)
      for (int j = 0; j < aa; ++j)
        if (i != j) worst = std::max(worst, gain(i, j));
  }
  return worst;
}

std::vector<Profile> pure_nash_profiles(const NormalFormGame& game,
                                        double tol) {
  std::vector<Profile> out;
  for (int idx = 0; idx < game.num_profiles(); ++idx) {
    Profile p = game.profile_from_index(idx);
    bool nash = true;
    for (int k = 0; nash && k < game.num_agents(); ++k) {
      const double base = game.utility(k, p);
      for (int j = 1; j <= game.num_actions(); ++j) {
        if (j == p[k]) continue;
        Profile q = p;
        q[k] = j;
        if (game.utility(k, q) > base + tol) {
          nash = false;
          break;
        }
      }
    }
    if (nash) out.push_back(p);
  }
  return out;
}

}  // namespace eqkit
