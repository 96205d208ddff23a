#pragma once

// Shared fixtures for the test binaries: the 3-agent/2-action example game
// (agents 1 and 2 symmetric, unique pure Nash at (2,2,1)) and its pair
// network.

#include <Eigen/Dense>

#include "eqkit/game.hpp"

namespace eqkit::testing {

inline NormalFormGame example_game() {
  NormalFormGame game(3, 2);
  auto set = [&](int a, int b, int c, double u1, double u2, double u3) {
    game.set_payoff({a, b, c}, Eigen::Vector3d(u1, u2, u3));
  };
  set(1, 1, 1, 2, 2, 5);
  set(1, 2, 1, 3, 6, 4);
  set(2, 1, 1, 6, 3, 4);
  set(2, 2, 1, 4, 4, 6);
  set(1, 1, 2, 1, 1, 3);
  set(1, 2, 2, 1, 4, 5);
  set(2, 1, 2, 4, 1, 0);
  set(2, 2, 2, 6, 6, 4);
  game.validate();
  return game;
}

// Agents 1 and 2 share an edge; agent 3 is isolated.
inline ConnectivityGraph pair_graph() {
  ConnectivityGraph g(3);
  g.add_edge(0, 1);
  return g;
}

// Neighbors put 1/4 weight on each other; zero row sums.
inline Eigen::MatrixXd pair_C() {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  c(0, 0) = -0.25;
  c(0, 1) = 0.25;
  c(1, 0) = 0.25;
  c(1, 1) = -0.25;
  return c;
}

}  // namespace eqkit::testing
