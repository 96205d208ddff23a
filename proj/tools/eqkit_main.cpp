// eqkit command line front end.
//
// Exit codes for the test subcommands: 0 = Pass / AcceptH0, 1 = Fail /
// RejectH0, 2 = usage or runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eqkit/detection.hpp"
#include "eqkit/io.hpp"
#include "eqkit/regret.hpp"
#include "eqkit/revealed.hpp"

using namespace eqkit;

int main(int argc, char** argv) {
  CLI::App app{"equilibrium learning and detection workbench"};
  app.require_subcommand(1);

  // simulate-learning
  auto* sim = app.add_subcommand("simulate-learning",
                                 "regret-matching simulation with diffusion");
  std::string sim_game, sim_graph, sim_out = "trace.csv",
              sim_variant = "diffusion";
  int sim_horizon = 5000, sim_runs = 100;
  double sim_eps = 0.01, sim_delta = 0.15;
  std::uint64_t sim_seed = 1;
  sim->add_option("--game", sim_game, "game JSON file")->required();
  sim->add_option("--graph", sim_graph, "network JSON file")->required();
  sim->add_option("--horizon", sim_horizon, "steps per run");
  sim->add_option("--runs", sim_runs, "independent runs");
  sim->add_option("--eps", sim_eps, "adaptation rate");
  sim->add_option("--delta", sim_delta, "exploration weight");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--variant", sim_variant, "diffusion | isolated")
      ->check(CLI::IsMember({"diffusion", "isolated"}));
  sim->add_option("--out", sim_out, "trace CSV path");

  // test-afriat
  auto* afr = app.add_subcommand("test-afriat",
                                 "single-agent utility-maximization test");
  std::string afr_data, afr_cert;
  afr->add_option("--data", afr_data, "dataset CSV")->required();
  afr->add_option("--cert", afr_cert, "write certificate JSON here on pass");

  // test-nash
  auto* nash = app.add_subcommand(
      "test-nash", "multi-agent concave-potential rationality test");
  std::string nash_data, nash_cert;
  nash->add_option("--data", nash_data, "dataset CSV")->required();
  nash->add_option("--cert", nash_cert, "write certificate JSON here on pass");

  // stat-test
  auto* stat = app.add_subcommand("stat-test",
                                  "noise-robust equilibrium-play test");
  std::string stat_data, stat_noise, stat_out;
  double stat_gamma = 0.05;
  int stat_mc = 10000;
  std::uint64_t stat_seed = 1;
  stat->add_option("--data", stat_data, "noisy dataset CSV")->required();
  stat->add_option("--noise", stat_noise, "gaussian:SIGMA | uniform:KAPPA")
      ->required();
  stat->add_option("--gamma", stat_gamma, "significance level");
  stat->add_option("--mc", stat_mc, "Monte Carlo samples for the M tail");
  stat->add_option("--seed", stat_seed, "rng seed");
  stat->add_option("--out", stat_out, "write outcome JSON here");

  // optimize-probe
  auto* opt = app.add_subcommand("optimize-probe",
                                 "SPSA probe design against Type-II errors");
  std::string opt_spec, opt_noise = "uniform:0.1", opt_out = "probes.csv";
  int opt_iters = 300, opt_T = 20, opt_cost_samples = 100, opt_mc = 10000;
  double opt_sigma = 0.1, opt_step = 0.2, opt_gamma = 0.05;
  std::uint64_t opt_seed = 1;
  opt->add_option("--spec", opt_spec, "malicious game spec JSON")->required();
  opt->add_option("--iters", opt_iters, "SPSA iterations");
  opt->add_option("--T", opt_T, "observations per panel");
  opt->add_option("--sigma", opt_sigma, "perturbation step");
  opt->add_option("--step", opt_step, "update gain");
  opt->add_option("--cost-samples", opt_cost_samples,
                  "noise panels per cost evaluation");
  opt->add_option("--mc", opt_mc, "M-tail samples");
  opt->add_option("--gamma", opt_gamma, "test significance level");
  opt->add_option("--noise", opt_noise, "observation noise model");
  opt->add_option("--seed", opt_seed, "rng seed");
  opt->add_option("--out", opt_out, "optimized probes CSV path");

  // gen-data
  auto* gen = app.add_subcommand("gen-data",
                                 "synthesize potential-game play data");
  std::string gen_spec, gen_out = "data.csv";
  int gen_T = 20;
  std::uint64_t gen_seed = 1;
  gen->add_option("--spec", gen_spec, "malicious game spec JSON")->required();
  gen->add_option("--T", gen_T, "observations");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "dataset CSV path");

  // run
  auto* runc = app.add_subcommand("run", "run an experiment config");
  std::string run_config;
  runc->add_option("--config", run_config, "experiment JSON config")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const NormalFormGame game = load_game(sim_game);
      const NetworkFile net = load_network(sim_graph);
      LearnerConfig lc;
      lc.step_size = sim_eps;
      lc.exploration = sim_delta;
      lc.rng_seed = sim_seed;
      SimulationOptions opts;
      opts.variant = sim_variant == "isolated" ? SimulationVariant::Isolated
                                               : SimulationVariant::Diffusion;
      const SimulationTrace trace = run_simulation(
          game, net.graph, net.C, lc, sim_horizon, sim_runs, opts);
      save_trace_csv(trace, sim_out);
      std::printf("final mean d_n = %.6f (from %.6f), trace -> %s\n",
                  trace.mean_d[sim_horizon - 1], trace.mean_d[0],
                  sim_out.c_str());
      return 0;
    }

    if (afr->parsed() || nash->parsed()) {
      const bool single = afr->parsed();
      const Dataset data = load_dataset(single ? afr_data : nash_data);
      std::string cert_json;
      bool pass = false;
      if (single) {
        const auto cert = afriat_test(data);
        pass = cert.has_value();
        if (cert) cert_json = certificate_json(*cert);
      } else {
        const auto cert = nash_rationality_test(data);
        pass = cert.has_value();
        if (cert) cert_json = certificate_json(*cert);
      }
      const std::string& cert_path = single ? afr_cert : nash_cert;
      if (pass && !cert_path.empty()) {
        std::ofstream out(cert_path);
        out << cert_json << "\n";
      }
      std::printf("%s\n", pass ? "Pass" : "Fail");
      return pass ? 0 : 1;
    }

    if (stat->parsed()) {
      const Dataset data = load_dataset(stat_data);
      NoisyDataset obs;
      obs.probes = data.probes;
      obs.observations = data.actions;
      obs.noise = parse_noise_model(stat_noise);
      Rng rng(stat_seed);
      const TestOutcome outcome =
          statistical_test(obs, stat_gamma, stat_mc, rng);
      const std::string text = outcome_json(outcome);
      if (!stat_out.empty()) {
        std::ofstream out(stat_out);
        out << text << "\n";
      }
      std::printf("phi* = %.6g, tail = %.4f, %s\n", outcome.phi_star,
                  outcome.tail_probability,
                  outcome.accept_h0 ? "AcceptH0" : "RejectH0");
      return outcome.accept_h0 ? 0 : 1;
    }

    if (opt->parsed()) {
      const MaliciousGameSpec spec = load_malicious_spec(opt_spec);
      SpsaConfig sc;
      sc.sigma = opt_sigma;
      sc.step = opt_step;
      sc.iterations = opt_iters;
      sc.cost_samples = opt_cost_samples;
      sc.rng_seed = opt_seed;
      SpsaContext ctx;
      ctx.normal.agents = spec.agents;
      ctx.noise = parse_noise_model(opt_noise);
      ctx.gamma = opt_gamma;
      ctx.mc_samples = opt_mc;
      Rng rng(opt_seed, 0x1417);
      Eigen::MatrixXd p0(opt_T, spec.probe_dim);
      for (int t = 0; t < opt_T; ++t)
        for (int j = 0; j < spec.probe_dim; ++j)
          p0(t, j) = rng.uniform(spec.probe_lo, spec.probe_hi);
      const SpsaTrace trace = spsa_optimize(p0, sc, ctx);
      save_probes_csv(trace.probes.back(), opt_out);
      std::printf("cost %.4f -> %.4f over %d iterations, probes -> %s\n",
                  trace.costs.front(), trace.costs.back(), opt_iters,
                  opt_out.c_str());
      return 0;
    }

    if (gen->parsed()) {
      const MaliciousGameSpec spec = load_malicious_spec(gen_spec);
      Rng rng(gen_seed);
      const Dataset data = generate_potential_game_data(spec, gen_T, rng);
      save_dataset(data, gen_out);
      std::printf("%d observations, %d agents -> %s\n", data.observations(),
                  data.agents(), gen_out.c_str());
      return 0;
    }

    if (runc->parsed()) {
      std::cout << run_experiment(run_config);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
