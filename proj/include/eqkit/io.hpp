#pragma once

#include <string>

#include "eqkit/detection.hpp"
#include "eqkit/game.hpp"
#include "eqkit/regret.hpp"
#include "eqkit/revealed.hpp"

namespace eqkit {

// Game files: JSON {num_agents, num_actions, payoffs: [[[profile],[utils]],
// ...], symmetric}.
NormalFormGame load_game(const std::string& path);
void save_game(const NormalFormGame& game, const std::string& path);

// Network files: JSON {num_agents, edges: [[k,l], ...], C: [[...]]} with
// 1-based agent indices; C optional (uniform neighbor weights otherwise).
struct NetworkFile {
  ConnectivityGraph graph;
  Eigen::MatrixXd C;
};
NetworkFile load_network(const std::string& path);

// Dataset CSV: header `t, p_1..p_m, x_1_1..x_1_m, ..., x_n_1..x_n_m`, one
// row per observation. Numbers round-trip at 17 significant digits.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

MaliciousGameSpec load_malicious_spec(const std::string& path);
void save_malicious_spec(const MaliciousGameSpec& spec,
                         const std::string& path);

void save_trace_csv(const SimulationTrace& trace, const std::string& path);
void save_probes_csv(const Eigen::MatrixXd& probes, const std::string& path);

std::string certificate_json(const AfriatCertificate& cert);
std::string certificate_json(const PotentialCertificate& cert);
std::string outcome_json(const TestOutcome& outcome);

NoiseModel parse_noise_model(const std::string& text);  // "gaussian:S"|"uniform:K"

// Experiment configs: JSON {kind, params..., seed, out}; writes artifact
// files plus a summary JSON carrying every parameter for reproducibility.
// Returns the summary text.
std::string run_experiment(const std::string& config_path);

}  // namespace eqkit
