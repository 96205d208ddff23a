#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "eqkit/io.hpp"
#include "eqkit/rng.hpp"
#include "support.hpp"

using namespace eqkit;
using eqkit::testing::example_game;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("eqkit-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset tiny_dataset(Rng& rng, int T, int agents) {
  Dataset d;
  d.probes.resize(T, 2);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < 2; ++j) d.probes(t, j) = rng.uniform(0.01, 5.0);
  for (int i = 0; i < agents; ++i) {
    Eigen::MatrixXd x(T, 2);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < 2; ++j) x(t, j) = rng.uniform(0.0, 5.0);
    d.actions.push_back(std::move(x));
  }
  return d;
}

}  // namespace

TEST_CASE("game files round trip") {
  TempDir tmp;
  const NormalFormGame game = example_game();
  const std::string path = tmp.file("game.json");
  save_game(game, path);
  const NormalFormGame loaded = load_game(path);
  CHECK(loaded.num_agents() == 3);
  CHECK(loaded.num_actions() == 2);
  for (int idx = 0; idx < game.num_profiles(); ++idx) {
    const Profile p = game.profile_from_index(idx);
    CHECK(loaded.utility(p) == game.utility(p));
  }
  CHECK(loaded.symmetric_flag() == game.symmetric_flag());
}

TEST_CASE("game files validate on load") {
  TempDir tmp;
  const std::string path = tmp.file("bad.json");
  // missing profiles
  write_file(path, R"({"num_agents":2,"num_actions":2,
    "payoffs":[[[1,1],[0,0]]]})");
  CHECK_THROWS(load_game(path));
  // symmetric flag on an asymmetric game
  write_file(path, R"({"num_agents":1,"num_actions":2,"symmetric":false,
    "payoffs":[[[1],[1.0]],[[2],[2.0]]]})");
  CHECK_NOTHROW(load_game(path));
  CHECK_THROWS(load_game(tmp.file("missing.json")));
}

TEST_CASE("network files") {
  TempDir tmp;
  const std::string path = tmp.file("net.json");

  SUBCASE("explicit combination matrix") {
    write_file(path, R"({"num_agents":3,"edges":[[1,2]],
      "C":[[-0.25,0.25,0],[0.25,-0.25,0],[0,0,0]]})");
    const NetworkFile net = load_network(path);
    CHECK(net.graph.num_agents() == 3);
    CHECK(net.graph.has_edge(0, 1));
    CHECK_FALSE(net.graph.has_edge(0, 2));
    CHECK(net.C(0, 1) == doctest::Approx(0.25));
    CHECK(net.C(2, 2) == 0.0);
    // the C on file must satisfy the combiner conditions
    CHECK_NOTHROW(build_weight_matrix(net.C, net.graph, 0.01));
  }

  SUBCASE("default uniform neighbor weights") {
    write_file(path, R"({"num_agents":4,"edges":[[1,2],[3,4]]})");
    const NetworkFile net = load_network(path);
    CHECK(net.C(0, 1) == doctest::Approx(0.25));
    CHECK(net.C(0, 0) == doctest::Approx(-0.25));
    CHECK(net.C(0, 2) == 0.0);
    CHECK_NOTHROW(build_weight_matrix(net.C, net.graph, 0.01));
  }

  SUBCASE("malformed C dimensions") {
    write_file(path, R"({"num_agents":2,"edges":[[1,2]],"C":[[0,0]]})");
    CHECK_THROWS(load_network(path));
  }
}

TEST_CASE("dataset CSV round trips at full precision") {
  TempDir tmp;
  Rng rng(13);
  const Dataset d = tiny_dataset(rng, 7, 3);
  const std::string path = tmp.file("d.csv");
  save_dataset(d, path);
  const Dataset back = load_dataset(path);
  CHECK(back.observations() == 7);
  CHECK(back.agents() == 3);
  CHECK(back.probes == d.probes);  // bitwise, thanks to 17 digits
  for (int i = 0; i < 3; ++i) CHECK(back.actions[i] == d.actions[i]);

  // a second trip is byte-identical
  const std::string again = tmp.file("d2.csv");
  save_dataset(back, again);
  CHECK(read_file(path) == read_file(again));
}

TEST_CASE("dataset CSV parse errors carry row numbers") {
  TempDir tmp;
  const std::string path = tmp.file("d.csv");

  SUBCASE("empty data section") {
    write_file(path, "t, p_1, p_2, x_1_1, x_1_2\n");
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains("T >= 1"),
                         std::runtime_error);
  }

  SUBCASE("wrong field count") {
    write_file(path,
               "t, p_1, p_2, x_1_1, x_1_2\n"
               "1, 1.0, 2.0, 3.0, 4.0\n"
               "2, 1.0, 2.0, 3.0\n");
    CHECK_THROWS_WITH_AS(load_dataset(path),
                         doctest::Contains("row 3: wrong field count"),
                         std::runtime_error);
  }

  SUBCASE("malformed number") {
    write_file(path,
               "t, p_1, p_2, x_1_1, x_1_2\n"
               "1, 1.0, oops, 3.0, 4.0\n");
    CHECK_THROWS_WITH_AS(load_dataset(path),
                         doctest::Contains("row 2: malformed number"),
                         std::runtime_error);
  }

  SUBCASE("nonpositive probe") {
    write_file(path,
               "t, p_1, p_2, x_1_1, x_1_2\n"
               "1, 1.0, -2.0, 3.0, 4.0\n");
    CHECK_THROWS_WITH_AS(load_dataset(path),
                         doctest::Contains("strictly positive"),
                         std::runtime_error);
  }

  SUBCASE("bad header") {
    write_file(path, "time, p_1, x_1_1\n1, 1.0, 2.0\n");
    CHECK_THROWS_AS(load_dataset(path), std::runtime_error);
  }
}

TEST_CASE("spec files round trip") {
  TempDir tmp;
  const MaliciousGameSpec spec = MaliciousGameSpec::paper_defaults();
  const std::string path = tmp.file("spec.json");
  save_malicious_spec(spec, path);
  const MaliciousGameSpec back = load_malicious_spec(path);
  CHECK(back.agents == 3);
  CHECK(back.beta == spec.beta);
  CHECK(back.budget_mean == spec.budget_mean);
  CHECK(back.budget_stddev == spec.budget_stddev);
  CHECK(back.probe_lo == spec.probe_lo);
  CHECK(back.probe_hi == spec.probe_hi);

  write_file(path, R"({"agents":2,"beta":[0.1,0.2],
    "budgets":[{"mean":10,"stddev":1}]})");
  CHECK_THROWS(load_malicious_spec(path));
}

TEST_CASE("trace and probe CSVs") {
  TempDir tmp;
  SimulationTrace trace;
  trace.mean_d = Eigen::Vector3d(0.5, 0.25, 0.125);
  trace.std_d = Eigen::Vector3d(0.1, 0.05, 0.025);
  const std::string tpath = tmp.file("trace.csv");
  save_trace_csv(trace, tpath);
  const std::string text = read_file(tpath);
  CHECK(text.find("n, mean_d_n, std_d_n") == 0);
  CHECK(text.find("2, 0.25, 0.05") != std::string::npos);

  Eigen::MatrixXd probes(2, 2);
  probes << 1.0, 2.0, 3.0, 4.5;
  const std::string ppath = tmp.file("probes.csv");
  save_probes_csv(probes, ppath);
  const std::string ptext = read_file(ppath);
  CHECK(ptext.find("t, p_1, p_2") == 0);
  CHECK(ptext.find("2, 3, 4.5") != std::string::npos);
}

TEST_CASE("certificates and outcomes serialize to parseable JSON") {
  AfriatCertificate cert;
  cert.u = Eigen::Vector2d(0.0, 1.5);
  cert.lambda = Eigen::Vector2d(1.0, 2.0);
  const json cj = json::parse(certificate_json(cert));
  CHECK(cj.at("u")[1] == 1.5);
  CHECK(cj.at("lambda")[0] == 1.0);

  PotentialCertificate pot;
  pot.v = Eigen::Vector2d(0.5, -0.5);
  pot.lambda = Eigen::MatrixXd::Ones(2, 3);
  const json pj = json::parse(certificate_json(pot));
  CHECK(pj.at("v")[0] == 0.5);
  CHECK(pj.at("lambda").size() == 2);
  CHECK(pj.at("lambda")[1].size() == 3);

  TestOutcome outcome;
  outcome.phi_star = 0.125;
  outcome.tail_probability = 0.75;
  outcome.accept_h0 = true;
  outcome.gamma = 0.05;
  const json oj = json::parse(outcome_json(outcome));
  CHECK(oj.at("phi_star") == 0.125);
  CHECK(oj.at("decision") == "AcceptH0");
  outcome.accept_h0 = false;
  CHECK(json::parse(outcome_json(outcome)).at("decision") == "RejectH0");
}

TEST_CASE("noise model strings") {
  CHECK(parse_noise_model("none").kind == NoiseModel::Kind::None);
  const NoiseModel g = parse_noise_model("gaussian:0.5");
  CHECK(g.kind == NoiseModel::Kind::Gaussian);
  CHECK(g.param == 0.5);
  const NoiseModel u = parse_noise_model("uniform:0.1");
  CHECK(u.kind == NoiseModel::Kind::Uniform);
  CHECK(u.param == 0.1);
  CHECK_THROWS_AS(parse_noise_model("gaussian"), std::invalid_argument);
  CHECK_THROWS_AS(parse_noise_model("cauchy:1.0"), std::invalid_argument);
}

TEST_CASE("experiment configs") {
  TempDir tmp;
  Rng rng(19);

  SUBCASE("afriat experiment over a CSV") {
    const Dataset d = tiny_dataset(rng, 3, 1);
    save_dataset(d, tmp.file("d.csv"));
    const json cfg{{"kind", "afriat"},
                   {"data", tmp.file("d.csv")},
                   {"summary", tmp.file("summary.json")}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    const std::string text = run_experiment(tmp.file("cfg.json"));
    const json summary = json::parse(text);
    CHECK(summary.at("result").contains("pass"));
    CHECK(summary.at("config").at("kind") == "afriat");
    CHECK(json::parse(read_file(tmp.file("summary.json"))) == summary);
    // determinism: a second run is byte-identical
    CHECK(run_experiment(tmp.file("cfg.json")) == text);
  }

  SUBCASE("gen-data experiment writes a loadable dataset") {
    MaliciousGameSpec spec = MaliciousGameSpec::paper_defaults();
    save_malicious_spec(spec, tmp.file("spec.json"));
    const json cfg{{"kind", "gen-data"},
                   {"spec", tmp.file("spec.json")},
                   {"T", 3},
                   {"seed", 11},
                   {"out", tmp.file("panel.csv")}};
    write_file(tmp.file("cfg.json"), cfg.dump());
    const json summary = json::parse(run_experiment(tmp.file("cfg.json")));
    CHECK(summary.at("result").at("observations") == 3);
    const Dataset back = load_dataset(tmp.file("panel.csv"));
    CHECK(back.observations() == 3);
    CHECK(back.agents() == 3);
    CHECK_NOTHROW(back.validate());
  }

  SUBCASE("unknown kinds are rejected") {
    write_file(tmp.file("cfg.json"), R"({"kind":"mystery"})");
    CHECK_THROWS_WITH_AS(run_experiment(tmp.file("cfg.json")),
                         doctest::Contains("unknown experiment kind"),
                         std::runtime_error);
  }
}
