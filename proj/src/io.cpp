#include "eqkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace eqkit {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    // trim spaces
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  return out;
}

}  // namespace

NormalFormGame load_game(const std::string& path) {
  const json j = load_json(path);
  NormalFormGame game(j.at("num_agents").get<int>(),
                      j.at("num_actions").get<int>());
  for (const auto& entry : j.at("payoffs")) {
    if (!entry.is_array() || entry.size() != 2)
      throw std::runtime_error(path + ": payoff entries must be [[profile],[utilities]]");
    Profile profile = entry[0].get<Profile>();
    const auto utils = entry[1].get<std::vector<double>>();
    game.set_payoff(profile, Eigen::Map<const Eigen::VectorXd>(
                                 utils.data(), utils.size()));
  }
  game.set_symmetric_flag(j.value("symmetric", false));
  game.validate();
  return game;
}

void save_game(const NormalFormGame& game, const std::string& path) {
  json payoffs = json::array();
  for (int idx = 0; idx < game.num_profiles(); ++idx) {
    const Profile p = game.profile_from_index(idx);
    const Eigen::VectorXd u = game.utility(p);
    payoffs.push_back({p, std::vector<double>(u.begin(), u.end())});
  }
  json j{{"num_agents", game.num_agents()},
         {"num_actions", game.num_actions()},
         {"payoffs", payoffs},
         {"symmetric", game.symmetric_flag()}};
  write_text(path, j.dump(2) + "\n");
}

NetworkFile load_network(const std::string& path) {
  const json j = load_json(path);
  const int k = j.at("num_agents").get<int>();
  ConnectivityGraph graph(k);
  for (const auto& e : j.at("edges"))
    graph.add_edge(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
  if (j.contains("C")) {
    const auto rows = j.at("C");
    if (static_cast<int>(rows.size()) != k)
      throw std::runtime_error(path + ": C must be K x K");
    for (int r = 0; r < k; ++r)
      for (int col = 0; col < k; ++col) c(r, col) = rows[r][col].get<double>();
  } else {
    // uniform neighbor weights: c_kl = 1/K on edges, zero-sum diagonal
    for (const auto& [a, b] : graph.edges()) {
      c(a, b) = c(b, a) = 1.0 / k;
    }
    for (int r = 0; r < k; ++r) c(r, r) = -c.row(r).sum();
  }
  return {std::move(graph), std::move(c)};
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file, T >= 1 required");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "t")
    throw std::runtime_error(path + ": header must be t, p_1.., x_1_1..");
  int m = 0;
  while (m + 1 < static_cast<int>(header.size()) &&
         header[m + 1] == "p_" + std::to_string(m + 1))
    ++m;
  if (m == 0) throw std::runtime_error(path + ": no probe columns p_1..");
  const int rest = static_cast<int>(header.size()) - 1 - m;
  if (rest <= 0 || rest % m != 0)
    throw std::runtime_error(path + ": action columns must be n blocks of m");
  const int n = rest / m;

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 1 + m + n * m)
      throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                               ": wrong field count");
    std::vector<double> vals;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(fields[f], &used));
        if (used != fields[f].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                                 ": malformed number '" + fields[f] + "'");
      }
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error(path + ": T >= 1 required");

  Dataset data;
  const int tt = static_cast<int>(rows.size());
  data.probes.resize(tt, m);
  data.actions.assign(n, Eigen::MatrixXd(tt, m));
  for (int t = 0; t < tt; ++t) {
    for (int j = 0; j < m; ++j) {
      data.probes(t, j) = rows[t][j];
      if (data.probes(t, j) <= 0.0)
        throw std::runtime_error(path + ": row " + std::to_string(t + 2) +
                                 ": probe entries must be strictly positive");
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) data.actions[i](t, j) = rows[t][m + i * m + j];
  }
  return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
  std::ostringstream out;
  const int m = data.probe_dim();
  out << "t";
  for (int j = 1; j <= m; ++j) out << ", p_" << j;
  for (int i = 1; i <= data.agents(); ++i)
    for (int j = 1; j <= m; ++j) out << ", x_" << i << "_" << j;
  out << "\n";
  for (int t = 0; t < data.observations(); ++t) {
    out << (t + 1);
    for (int j = 0; j < m; ++j) out << ", " << fmt17(data.probes(t, j));
    for (int i = 0; i < data.agents(); ++i)
      for (int j = 0; j < m; ++j) out << ", " << fmt17(data.actions[i](t, j));
    out << "\n";
  }
  write_text(path, out.str());
}

MaliciousGameSpec load_malicious_spec(const std::string& path) {
  const json j = load_json(path);
  MaliciousGameSpec spec;
  spec.agents = j.at("agents").get<int>();
  spec.probe_dim = j.value("probe_dim", 2);
  const auto beta = j.at("beta").get<std::vector<double>>();
  spec.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
  spec.budget_mean.resize(spec.agents);
  spec.budget_stddev.resize(spec.agents);
  const auto budgets = j.at("budgets");
  if (static_cast<int>(budgets.size()) != spec.agents)
    throw std::runtime_error(path + ": one budget entry per agent");
  for (int i = 0; i < spec.agents; ++i) {
    spec.budget_mean[i] = budgets[i].at("mean").get<double>();
    spec.budget_stddev[i] = budgets[i].at("stddev").get<double>();
  }
  if (j.contains("probe")) {
    spec.probe_lo = j["probe"].at("lo").get<double>();
    spec.probe_hi = j["probe"].at("hi").get<double>();
  }
  spec.validate();
  return spec;
}

void save_malicious_spec(const MaliciousGameSpec& spec,
                         const std::string& path) {
  json budgets = json::array();
  for (int i = 0; i < spec.agents; ++i)
    budgets.push_back(
        {{"mean", spec.budget_mean[i]}, {"stddev", spec.budget_stddev[i]}});
  json j{{"agents", spec.agents},
         {"probe_dim", spec.probe_dim},
         {"beta", std::vector<double>(spec.beta.begin(), spec.beta.end())},
         {"budgets", budgets},
         {"probe", {{"lo", spec.probe_lo}, {"hi", spec.probe_hi}}}};
  write_text(path, j.dump(2) + "\n");
}

void save_trace_csv(const SimulationTrace& trace, const std::string& path) {
  std::ostringstream out;
  out << "n, mean_d_n, std_d_n\n";
  for (int n = 0; n < trace.mean_d.size(); ++n)
    out << (n + 1) << ", " << fmt17(trace.mean_d[n]) << ", "
        << fmt17(trace.std_d[n]) << "\n";
  write_text(path, out.str());
}

void save_probes_csv(const Eigen::MatrixXd& probes, const std::string& path) {
  std::ostringstream out;
  out << "t";
  for (int j = 1; j <= probes.cols(); ++j) out << ", p_" << j;
  out << "\n";
  for (int t = 0; t < probes.rows(); ++t) {
    out << (t + 1);
    for (int j = 0; j < probes.cols(); ++j) out << ", " << fmt17(probes(t, j));
    out << "\n";
  }
  write_text(path, out.str());
}

std::string certificate_json(const AfriatCertificate& cert) {
  json j{{"u", std::vector<double>(cert.u.begin(), cert.u.end())},
         {"lambda",
          std::vector<double>(cert.lambda.begin(), cert.lambda.end())}};
  return j.dump(2);
}

std::string certificate_json(const PotentialCertificate& cert) {
  json lambda = json::array();
  for (int t = 0; t < cert.lambda.rows(); ++t)
    lambda.push_back(std::vector<double>(cert.lambda.row(t).begin(),
                                         cert.lambda.row(t).end()));
  json j{{"v", std::vector<double>(cert.v.begin(), cert.v.end())},
         {"lambda", lambda}};
  return j.dump(2);
}

std::string outcome_json(const TestOutcome& outcome) {
  json j{{"phi_star", outcome.phi_star},
         {"tail_probability", outcome.tail_probability},
         {"decision", outcome.accept_h0 ? "AcceptH0" : "RejectH0"},
         {"gamma", outcome.gamma}};
  return j.dump(2);
}

NoiseModel parse_noise_model(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "none") return NoiseModel::none();
  if (colon == std::string::npos)
    throw std::invalid_argument("noise model: expected kind:param");
  const double param = std::stod(text.substr(colon + 1));
  if (kind == "gaussian") return NoiseModel::gaussian(param);
  if (kind == "uniform") return NoiseModel::uniform(param);
  throw std::invalid_argument("noise model: unknown kind '" + kind + "'");
}

namespace {

std::string noise_to_string(const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::Gaussian:
      return "gaussian:" + fmt17(noise.param);
    case NoiseModel::Kind::Uniform:
      return "uniform:" + fmt17(noise.param);
    default:
      return "none";
  }
}

json run_learning(const json& cfg) {
  const NormalFormGame game = load_game(cfg.at("game"));
  const NetworkFile net = load_network(cfg.at("graph"));
  LearnerConfig lc;
  lc.step_size = cfg.value("eps", 0.01);
  lc.exploration = cfg.value("delta", 0.15);
  lc.rng_seed = cfg.value("seed", 1);
  SimulationOptions opts;
  const std::string variant = cfg.value("variant", "diffusion");
  opts.variant = variant == "isolated" ? SimulationVariant::Isolated
                                       : SimulationVariant::Diffusion;
  const int horizon = cfg.value("horizon", 5000);
  const int runs = cfg.value("runs", 100);
  const SimulationTrace trace =
      run_simulation(game, net.graph, net.C, lc, horizon, runs, opts);
  save_trace_csv(trace, cfg.at("out"));
  double mean_violation = 0.0;
  for (const auto& z : trace.final_z)
    mean_violation += ce_epsilon_violation(game, z);
  mean_violation /= static_cast<double>(trace.final_z.size());
  return {{"final_mean_d", trace.mean_d[horizon - 1]},
          {"initial_mean_d", trace.mean_d[0]},
          {"mean_final_ce_violation", mean_violation}};
}

json run_afriat(const json& cfg) {
  const Dataset data = load_dataset(cfg.at("data"));
  const auto cert = afriat_test(data);
  json out{{"pass", cert.has_value()}};
  if (cert) out["certificate"] = json::parse(certificate_json(*cert));
  return out;
}

json run_nash(const json& cfg) {
  const Dataset data = load_dataset(cfg.at("data"));
  const auto cert = nash_rationality_test(data);
  json out{{"pass", cert.has_value()}};
  if (cert) out["certificate"] = json::parse(certificate_json(*cert));
  return out;
}

json run_stat_test(const json& cfg) {
  const Dataset data = load_dataset(cfg.at("data"));
  NoisyDataset obs;
  obs.probes = data.probes;
  obs.observations = data.actions;
  obs.noise = parse_noise_model(cfg.at("noise"));
  Rng rng(cfg.value("seed", 1));
  const TestOutcome outcome = statistical_test(
      obs, cfg.value("gamma", 0.05), cfg.value("mc", 10000), rng);
  return json::parse(outcome_json(outcome));
}

json run_gen_data(const json& cfg) {
  const MaliciousGameSpec spec = load_malicious_spec(cfg.at("spec"));
  Rng rng(cfg.value("seed", 1));
  const Dataset data =
      generate_potential_game_data(spec, cfg.value("T", 20), rng);
  save_dataset(data, cfg.at("out"));
  return {{"observations", data.observations()}, {"agents", data.agents()}};
}

json run_spsa(const json& cfg) {
  const MaliciousGameSpec spec = load_malicious_spec(cfg.at("spec"));
  SpsaConfig sc;
  sc.sigma = cfg.value("sigma", 0.1);
  sc.step = cfg.value("step", 0.2);
  sc.iterations = cfg.value("iters", 300);
  sc.cost_samples = cfg.value("cost_samples", 100);
  sc.rng_seed = cfg.value("seed", 1);
  SpsaContext ctx;
  ctx.normal.agents = spec.agents;
  ctx.noise = parse_noise_model(cfg.value("noise", "uniform:0.1"));
  ctx.gamma = cfg.value("gamma", 0.05);
  ctx.mc_samples = cfg.value("mc", 10000);
  const int tt = cfg.value("T", 20);
  Rng rng(sc.rng_seed, 0x1417);
  Eigen::MatrixXd p0(tt, spec.probe_dim);
  for (int t = 0; t < tt; ++t)
    for (int j = 0; j < spec.probe_dim; ++j)
      p0(t, j) = rng.uniform(spec.probe_lo, spec.probe_hi);
  const SpsaTrace trace = spsa_optimize(p0, sc, ctx);
  save_probes_csv(trace.probes.back(), cfg.at("out"));
  json costs = trace.costs;
  return {{"first_cost", trace.costs.front()},
          {"final_cost", trace.costs.back()},
          {"costs", costs}};
}

}  // namespace

std::string run_experiment(const std::string& config_path) {
  const json cfg = load_json(config_path);
  const std::string kind = cfg.at("kind").get<std::string>();
  json result;
  if (kind == "learning")
    result = run_learning(cfg);
  else if (kind == "afriat")
    result = run_afriat(cfg);
  else if (kind == "nash")
    result = run_nash(cfg);
  else if (kind == "stat-test")
    result = run_stat_test(cfg);
  else if (kind == "gen-data")
    result = run_gen_data(cfg);
  else if (kind == "spsa")
    result = run_spsa(cfg);
  else
    throw std::runtime_error("unknown experiment kind '" + kind + "'");

  json summary{{"config", cfg}, {"result", result}};
  const std::string text = summary.dump(2) + "\n";
  if (cfg.contains("summary"))
    write_text(cfg.at("summary").get<std::string>(), text);
  return text;
}

}  // namespace eqkit
