#include "eqkit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eqkit {

NoiseModel NoiseModel::gaussian(double sigma) {
  if (sigma < 0.0 || !std::isfinite(sigma))
    throw std::invalid_argument("NoiseModel: sigma must be finite and >= 0");
  return {Kind::Gaussian, sigma};
}

NoiseModel NoiseModel::uniform(double kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa))
    throw std::invalid_argument("NoiseModel: kappa must be finite and >= 0");
  return {Kind::Uniform, kappa};
}

double NoiseModel::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Gaussian:
      return rng.gaussian(0.0, param);
    case Kind::Uniform:
      return rng.uniform(0.0, param);
    default:
      return 0.0;
  }
}

NoisyDataset NoisyDataset::observe(const Dataset& clean,
                                   const NoiseModel& noise, Rng& rng) {
  NoisyDataset out;
  out.probes = clean.probes;
  out.noise = noise;
  out.observations.reserve(clean.agents());
  for (const auto& x : clean.actions) {
    Eigen::MatrixXd y = x;
    for (Eigen::Index r = 0; r < y.rows(); ++r)
      for (Eigen::Index c = 0; c < y.cols(); ++c) y(r, c) += noise.sample(rng);
    out.observations.push_back(std::move(y));
  }
  return out;
}

Dataset NoisyDataset::as_dataset() const {
  Dataset d;
  d.probes = probes;
  d.actions = observations;
  return d;
}

MaliciousGameSpec MaliciousGameSpec::paper_defaults() {
  MaliciousGameSpec spec;
  spec.agents = 3;
  spec.probe_dim = 2;
  spec.beta = Eigen::Vector2d(0.03, 0.08);
  spec.budget_mean = Eigen::Vector3d(20.0, 50.0, 80.0);
  spec.budget_stddev = Eigen::Vector3d(1.0, 1.0, 2.0);
  return spec;
}

void MaliciousGameSpec::validate() const {
  if (agents < 1) throw std::invalid_argument("MaliciousGameSpec: n >= 1");
  if (probe_dim != 2)
    throw std::invalid_argument(
        "MaliciousGameSpec: the interdependence term requires m = 2");
  if (beta.size() != probe_dim || beta.minCoeff() <= 0.0)
    throw std::invalid_argument("MaliciousGameSpec: beta entries must be > 0");
  if (budget_mean.size() != agents || budget_stddev.size() != agents)
    throw std::invalid_argument("MaliciousGameSpec: one budget per agent");
  if (budget_mean.minCoeff() <= 0.0)
    throw std::invalid_argument("MaliciousGameSpec: budget means must be > 0");
  if (!(probe_hi >= probe_lo && probe_lo > 0.0))
    throw std::invalid_argument("MaliciousGameSpec: probe bounds invalid");
}

double malicious_utility(const Eigen::VectorXd& x_i,
                         const std::vector<Eigen::VectorXd>& x_others,
                         const Eigen::VectorXd& beta) {
  if (x_i.minCoeff() <= 0.0)
    throw std::domain_error("malicious_utility: action components must be > 0");
  double sum1 = x_i[0], sum2 = x_i[1];
  for (const auto& x : x_others) {
    if (x.minCoeff() <= 0.0)
      throw std::domain_error(
          "malicious_utility: action components must be > 0");
    sum1 += x[0];
    sum2 += x[1];
  }
  const double r = std::log(x_i[0] * x_i[1] / (sum1 * sum2));
  double s = 0.0;
  for (Eigen::Index j = 0; j < x_i.size(); ++j)
    s += std::log1p(x_i[j] / beta[j]);
  return r + s;
}

namespace {

constexpr double kActionFloor = 1e-6;

// Alternating projection onto {x >= floor, p'x <= budget}.
void project_feasible(Eigen::VectorXd& x, const Eigen::VectorXd& p,
                      double budget) {
  const double pp = p.squaredNorm();
  for (int it = 0; it < 200; ++it) {
    x = x.cwiseMax(kActionFloor);
    const double excess = p.dot(x) - budget;
    if (excess <= 1e-12) return;
    x.noalias() -= (excess / pp) * p;
  }
  x = x.cwiseMax(kActionFloor);
}

// Aggregate potential: sum_i [ln x^i(1) + ln x^i(2)] - n ln X1 - n ln X2 +
// sum_{i,j} ln(1 + x^i(j)/beta_j), which is the sum of the agent utilities.
struct Potential {
  const MaliciousGameSpec& spec;

  double value(const Eigen::MatrixXd& x) const {  // x is n x m
    const int n = static_cast<int>(x.rows());
    double v = x.array().log().sum();
    for (int j = 0; j < x.cols(); ++j) v -= n * std::log(x.col(j).sum());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < x.cols(); ++j)
        v += std::log1p(x(i, j) / spec.beta[j]);
    return v;
  }

  Eigen::MatrixXd gradient(const Eigen::MatrixXd& x) const {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd g(x.rows(), x.cols());
    for (int j = 0; j < x.cols(); ++j) {
      const double colsum = x.col(j).sum();
      for (int i = 0; i < n; ++i)
        g(i, j) = 1.0 / x(i, j) - n / colsum +
                  1.0 / (spec.beta[j] + x(i, j));
    }
    return g;
  }
};

// Projected gradient ascent with backtracking on the concave aggregate
// potential; per-agent budget constraints.
Eigen::MatrixXd solve_pot_max(const MaliciousGameSpec& spec,
                              const Eigen::VectorXd& probe,
                              const Eigen::VectorXd& budgets) {
  const int n = spec.agents;
  const int m = spec.probe_dim;
  const Potential pot{spec};

  Eigen::MatrixXd x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = budgets[i] / (m * probe[j]);

  auto project_all = [&](Eigen::MatrixXd& z) {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd row = z.row(i);
      project_feasible(row, probe, budgets[i]);
      z.row(i) = row;
    }
  };
  auto projected_grad_norm = [&](const Eigen::MatrixXd& z) {
    const double h = 1e-6;
    Eigen::MatrixXd step = z + h * pot.gradient(z);
    project_all(step);
    return (step - z).norm() / h;
  };

  constexpr int kMaxIters = 50000;
  double step = 1.0;
  double fx = pot.value(x);
  for (int it = 0; it < kMaxIters; ++it) {
    const Eigen::MatrixXd g = pot.gradient(x);
    Eigen::MatrixXd trial;
    double ftrial = 0.0;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      trial = x + step * g;
      project_all(trial);
      ftrial = pot.value(trial);
      if (ftrial > fx + 1e-14) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    x = trial;
    fx = ftrial;
    step *= 2.0;  // re-expand after an accepted step
    if ((it & 15) == 0 && projected_grad_norm(x) <= 1e-5) return x;
  }
  const double residual = projected_grad_norm(x);
  if (residual > 1e-5) {
    std::ostringstream msg;
    msg << "generate_potential_game_data: projected gradient ascent stalled, "
        << "projected-gradient norm " << residual << " > 1e-5; iterate = ["
        << x.reshaped().transpose() << "]";
    throw std::runtime_error(msg.str());
  }
  return x;
}

}  // namespace

Dataset generate_potential_game_data(const MaliciousGameSpec& spec, int T,
                                     Rng& rng) {
  spec.validate();
  if (T < 1) throw std::invalid_argument("generate_potential_game_data: T >= 1");
  Dataset data;
  data.probes.resize(T, spec.probe_dim);
  data.actions.assign(spec.agents,
                      Eigen::MatrixXd::Zero(T, spec.probe_dim));
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd probe(spec.probe_dim);
    for (int j = 0; j < spec.probe_dim; ++j)
      probe[j] = rng.uniform(spec.probe_lo, spec.probe_hi);
    Eigen::VectorXd budgets(spec.agents);
    for (int i = 0; i < spec.agents; ++i) {
      double b = rng.gaussian(spec.budget_mean[i], spec.budget_stddev[i]);
      while (b <= 1.0) b = rng.gaussian(spec.budget_mean[i], spec.budget_stddev[i]);
      budgets[i] = b;
    }
    const Eigen::MatrixXd x = solve_pot_max(spec, probe, budgets);
    data.probes.row(t) = probe;
    for (int i = 0; i < spec.agents; ++i) data.actions[i].row(t) = x.row(i);
  }
  return data;
}

double phi_upper_bound(const NoisyDataset& obs) {
  const int tt = obs.observations_count();
  const int n = obs.agents();
  double bound = 0.0;
  for (int t = 0; t < tt; ++t)
    for (int tau = 0; tau < tt; ++tau) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += std::abs(obs.probes.row(t).dot(obs.observations[i].row(tau) -
                                            obs.observations[i].row(t)));
      bound = std::max(bound, s);
    }
  return bound;
}

double test_statistic_phi(const NoisyDataset& obs) {
  auto feasible_at = [&](double phi) {
    return static_cast<bool>(
        feasible(afriat_style_system(obs.probes, obs.observations, phi)));
  };
  if (obs.observations_count() == 1 || feasible_at(0.0)) return 0.0;
  double lo = 0.0;
  double hi = phi_upper_bound(obs);
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Eigen::VectorXd sample_m(const Eigen::MatrixXd& probes, int agents,
                         const NoiseModel& noise, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("sample_m: N >= 1 required");
  const int tt = static_cast<int>(probes.rows());
  const int m = static_cast<int>(probes.cols());
  Eigen::VectorXd out(samples);
  if (noise.kind == NoiseModel::Kind::None) {
    out.setZero();
    return out;
  }
  Eigen::MatrixXd w(tt, m);
  Eigen::MatrixXd a(tt, tt);
  Eigen::MatrixXd acc(tt, tt);
  for (int s = 0; s < samples; ++s) {
    acc.setZero();
    for (int i = 0; i < agents; ++i) {
      for (int t = 0; t < tt; ++t)
        for (int j = 0; j < m; ++j) w(t, j) = noise.sample(rng);
      a.noalias() = probes * w.transpose();  // a(t, tau) = p_t' w_tau
      acc += (a.colwise() - a.diagonal()).cwiseAbs();
    }
    out[s] = acc.maxCoeff();
  }
  return out;
}

double estimate_M_tail(const Eigen::MatrixXd& probes, int agents,
                       const NoiseModel& noise, double phi_star, int samples,
                       Rng& rng) {
  const Eigen::VectorXd ms = sample_m(probes, agents, noise, samples, rng);
  return static_cast<double>((ms.array() >= phi_star).count()) / samples;
}

TestOutcome statistical_test(const NoisyDataset& obs, double gamma,
                             int mc_samples, Rng& rng) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("statistical_test: gamma must be in (0,1)");
  TestOutcome out;
  out.gamma = gamma;
  out.phi_star = test_statistic_phi(obs);
  out.tail_probability = estimate_M_tail(obs.probes, obs.agents(), obs.noise,
                                         out.phi_star, mc_samples, rng);
  out.accept_h0 = out.tail_probability > gamma;
  return out;
}

void SpsaConfig::validate() const {
  if (!(sigma > 0.0) || !(step >= 0.0) || iterations < 1 || cost_samples < 1)
    throw std::invalid_argument("SpsaConfig: positive parameters required");
}

namespace {

// Largest phi with empirical tail(phi) >= alpha; acceptance of the test is
// then equivalent to feasibility of the slack system at this threshold.
double accept_threshold(Eigen::VectorXd ms, double alpha) {
  std::sort(ms.begin(), ms.end());
  const int n = static_cast<int>(ms.size());
  const int need = std::max(1, static_cast<int>(std::ceil(alpha * n)));
  return ms[n - need];
}

}  // namespace

double spsa_cost(const Eigen::MatrixXd& probes, const SpsaContext& ctx, int K,
                 Rng rng) {
  if (probes.minCoeff() <= 0.0)
    throw std::invalid_argument("spsa_cost: probes must be strictly positive");
  const int tt = static_cast<int>(probes.rows());
  const int m = static_cast<int>(probes.cols());
  const int n = ctx.normal.agents;

  const double threshold = accept_threshold(
      sample_m(probes, n, ctx.noise, ctx.mc_samples, rng), ctx.gamma);

  // Each repetition draws a fresh probe-independent normal-agent panel plus
  // its noise; the estimate averages the accept indicator over the ensemble.
  int accepted = 0;
  std::vector<Eigen::MatrixXd> y(n, Eigen::MatrixXd(tt, m));
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < tt; ++t)
        for (int j = 0; j < m; ++j)
          y[i](t, j) =
              rng.uniform(ctx.normal.action_lo, ctx.normal.action_hi) +
              ctx.noise.sample(rng);
    // Accept iff phi* <= threshold iff the slack system is feasible there.
    if (feasible(afriat_style_system(probes, y, threshold))) ++accepted;
  }
  return static_cast<double>(accepted) / K;
}

SpsaTrace spsa_optimize(const Eigen::MatrixXd& initial_probes,
                        const SpsaConfig& cfg, const SpsaCostFn& cost) {
  cfg.validate();
  if (initial_probes.minCoeff() <= 0.0)
    throw std::invalid_argument("spsa_optimize: initial probes must be > 0");

  SpsaTrace trace;
  Eigen::MatrixXd p = initial_probes;
  Rng delta_rng(cfg.rng_seed, 0xd17a);
  for (int q = 0; q < cfg.iterations; ++q) {
    Eigen::MatrixXd delta(p.rows(), p.cols());
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c)
        delta(r, c) = delta_rng.next_u64() & 1 ? 1.0 : -1.0;

    // Common random numbers across the two perturbed evaluations.
    Rng eval_rng(cfg.rng_seed, 0xc057, static_cast<std::uint64_t>(q));
    const Eigen::MatrixXd p_plus =
        (p + cfg.sigma * delta).cwiseMax(cfg.probe_floor);
    const Eigen::MatrixXd p_minus =
        (p - cfg.sigma * delta).cwiseMax(cfg.probe_floor);
    const double j_plus = cost(p_plus, eval_rng);
    const double j_minus = cost(p_minus, eval_rng);

    trace.probes.push_back(p);
    trace.costs.push_back(0.5 * (j_plus + j_minus));

    const Eigen::MatrixXd grad =
        (j_plus - j_minus) / (2.0 * cfg.sigma) * delta.cwiseInverse();
    p = (p - cfg.step * grad).cwiseMax(cfg.probe_floor);
  }
  return trace;
}

SpsaTrace spsa_optimize(const Eigen::MatrixXd& initial_probes,
                        const SpsaConfig& cfg, const SpsaContext& ctx) {
  return spsa_optimize(initial_probes, cfg,
                       SpsaCostFn([&ctx, &cfg](const Eigen::MatrixXd& probes,
                                               Rng rng) {
                         return spsa_cost(probes, ctx, cfg.cost_samples, rng);
                       }));
}

}  // namespace eqkit
