#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phibe/basis.hpp"
#include "phibe/dynamics.hpp"
#include "phibe/estimators.hpp"
#include "phibe/experiments.hpp"
#include "phibe/fdcoeff.hpp"
#include "phibe/galerkin.hpp"
#include "phibe/metrics.hpp"
#include "phibe/modelfree.hpp"
#include "phibe/quadrature.hpp"
#include "phibe/rng.hpp"

namespace {

using nlohmann::json;
using namespace phibe;

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--params", "expected key=value, got '" + item + "'");
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

double take(std::map<std::string, double>& params, const std::string& key, double def) {
  auto it = params.find(key);
  if (it == params.end()) return def;
  const double v = it->second;
  params.erase(it);
  return v;
}

DynamicsModel make_model(const std::string& name, const std::string& params_text) {
  auto params = parse_params(params_text);
  DynamicsModel model;
  if (name == "linear1d") {
    model = DynamicsModel::linear1d(take(params, "lambda", 0.05));
  } else if (name == "nonlinear-sin1d") {
    model = DynamicsModel::nonlinear_sin1d(take(params, "lambda", 0.1));
  } else if (name == "ou1d") {
    model = DynamicsModel::ou1d(take(params, "lambda", -0.25), take(params, "sigma", 0.5));
  } else if (name == "cubic1d") {
    model = DynamicsModel::cubic_stabilization1d(take(params, "kappa", 0.1),
                                                 take(params, "alpha", 0.1),
                                                 take(params, "b", 0.1), take(params, "K", 2.0),
                                                 take(params, "sigma", 0.05));
  } else if (name == "lq10") {
    const Lq10Problem prob = make_lq10_problem();
    model = DynamicsModel::linear_nd(prob.A, prob.Sigma.diagonal());
  } else {
    throw CLI::ValidationError("--model", "unknown model '" + name + "'");
  }
  if (!params.empty())
    throw CLI::ValidationError("--params",
                               "model '" + name + "' ignores key '" + params.begin()->first + "'");
  return model;
}

BasisSet make_basis(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const int arg = colon == std::string::npos ? -1 : std::stoi(text.substr(colon + 1));
  if (kind == "fourier") return BasisSet::fourier(arg < 0 ? 4 : arg);
  if (kind == "monomial") return BasisSet::monomial1d(arg < 0 ? 2 : arg);
  if (kind == "legendre") return BasisSet::legendre1d(arg < 0 ? 8 : arg);
  if (kind == "poly2") return BasisSet::polynomial2(arg < 0 ? 10 : arg);
  throw CLI::ValidationError("--basis",
                             "expected fourier:M, monomial:DEG, legendre:DEG or poly2:D");
}

std::pair<double, double> basis_domain(const BasisSet& basis) {
  if (basis.kind == BasisSet::Kind::FourierPeriodic) return {-M_PI, M_PI};
  return {-1.0, 1.0};
}

// Reward specs: cos3:k=1,beta=0.1 | quadratic:R=1.4 | lq10
RewardFn make_reward(const DynamicsModel& model, const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  auto params = parse_params(colon == std::string::npos ? "" : text.substr(colon + 1));
  RewardFn reward;
  if (kind == "cos3") {
    if (model.d != 1) throw CLI::ValidationError("--reward", "cos3 needs a 1D model");
    const double beta = take(params, "beta", 0.1);
    reward = designed_reward_cos3(model, beta, take(params, "k", 1.0));
  } else if (kind == "quadratic") {
    const double R = take(params, "R", 1.4);
    reward = [R](const Eigen::VectorXd& s) { return R * s.squaredNorm(); };
  } else if (kind == "lq10") {
    if (model.d != 10) throw CLI::ValidationError("--reward", "lq10 pairs with --model lq10");
    const Eigen::MatrixXd Q = make_lq10_problem().Q;
    reward = [Q](const Eigen::VectorXd& s) { return s.dot(Q * s); };
  } else {
    throw CLI::ValidationError("--reward", "expected cos3:..., quadratic:R=..., or lq10");
  }
  if (!params.empty())
    throw CLI::ValidationError("--reward",
                               "reward '" + kind + "' ignores key '" + params.begin()->first + "'");
  return reward;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw CLI::FileError::Missing("cannot open '" + path + "' for writing");
  return f;
}

// (s, V(s)) along the first coordinate axis; full grid in one dimension.
void write_value_grid(std::ostream& os, const ValueApprox& va) {
  const auto [lo, hi] = basis_domain(va.basis);
  const int n = 401;
  os << "s,V\n" << std::setprecision(12);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(va.basis.d);
  for (int i = 0; i < n; ++i) {
    s(0) = lo + (hi - lo) * i / (n - 1);
    os << s(0) << ',' << va.value(s) << '\n';
  }
}

void write_sidecar(const std::string& csv_path, const ValueApprox& va, const json& extra) {
  json side;
  side["theta"] = std::vector<double>(va.theta.data(), va.theta.data() + va.theta.size());
  side["residual"] = va.residual;
  side["condition"] = va.condition;
  side["basis"] = va.basis.name();
  for (auto it = extra.begin(); it != extra.end(); ++it) side[it.key()] = *it;
  std::ofstream f(csv_path + ".json");
  f << side.dump(2) << '\n';
}

// ----------------------------------------------------------------- coeffs

int cmd_coeffs(int order) {
  const FdCoefficients c = fd_coefficients(order);
  std::cout << "j,a_j\n" << std::setprecision(17);
  for (int j = 0; j < static_cast<int>(c.weights.size()); ++j)
    std::cout << j << ',' << c.weights[j] << '\n';
  std::cout << "k,residual\n";
  const std::vector<double> res = moment_residuals(c);
  for (int k = 0; k <= order; ++k) std::cout << k << ',' << std::abs(res[k]) << '\n';
  return 0;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const DynamicsModel& model, double dt, int m, int n_traj, int substeps,
                 std::uint64_t seed, const RewardFn& reward, const std::string& out) {
  auto rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> unif(-M_PI, M_PI);
  std::ofstream f = open_out(out);
  f << "traj_id,step";
  for (int k = 0; k < model.d; ++k) f << ",s_" << k;
  if (reward) f << ",reward";
  f << '\n' << std::setprecision(12);
  for (int j = 0; j < n_traj; ++j) {
    Eigen::VectorXd s0(model.d);
    for (int k = 0; k < model.d; ++k) s0(k) = unif(rng);
    const std::uint64_t tseed = derive_stream_seed(seed, 10 + static_cast<std::uint64_t>(j));
    const Trajectory traj = model.has_exact_transition()
                                ? sample_trajectory_exact(model, s0, dt, m, tseed)
                                : simulate_trajectory(model, s0, dt, m, substeps, tseed);
    for (int i = 0; i < traj.num_states(); ++i) {
      f << j << ',' << i;
      for (int k = 0; k < model.d; ++k) f << ',' << traj.states(i, k);
      if (reward) f << ',' << reward(traj.states.row(i).transpose());
      f << '\n';
    }
  }
  std::cerr << "wrote " << n_traj << " trajectories (" << (m + 1) << " states each) to " << out
            << '\n';
  return 0;
}

// ---------------------------------------------------------- solve-galerkin

int cmd_solve_galerkin(const std::string& model_name, const std::string& params_text,
                       const BasisSet& basis, int order, double beta, double dt,
                       const std::string& mode, const std::string& out) {
  const DynamicsModel model = make_model(model_name, params_text);
  if (model.kind == DynamicsModel::Kind::CubicStabilization1D ||
      model.kind == DynamicsModel::Kind::LinearND)
    throw CLI::ValidationError("--model",
                               "solve-galerkin supports linear1d, nonlinear-sin1d and ou1d");
  if (basis.d != model.d) throw CLI::ValidationError("--basis", "basis dimension != model");

  const auto [lo, hi] = basis_domain(basis);
  const Quadrature quad = gauss_legendre(lo, hi, 400);
  const double k = 1.0;
  const RewardFn reward = designed_reward_cos3(model, beta, k);

  LinearSystem sys;
  if (mode == "phibe") {
    TransitionMomentProvider provider;
    bool stochastic = false;
    switch (model.kind) {
      case DynamicsModel::Kind::Linear1D:
        provider = TransitionMomentProvider::linear1d(model.lambda);
        break;
      case DynamicsModel::Kind::OU1D:
        provider = TransitionMomentProvider::ou(model.lambda, model.sigma);
        stochastic = true;
        break;
      default:
        provider = TransitionMomentProvider::deterministic_flow(model, 1e-3);
        break;
    }
    sys = assemble_phibe(basis, provider, reward, beta, dt, order, quad, {}, stochastic);
  } else if (mode == "be") {
    TransitionKernel kernel;
    if (model.kind == DynamicsModel::Kind::OU1D) {
      kernel = TransitionKernel::ou_gauss(model.lambda, model.sigma, dt);
    } else if (model.kind == DynamicsModel::Kind::Linear1D) {
      const double e = std::exp(model.lambda * dt);
      kernel = TransitionKernel::deterministic_map(
          [e](const Eigen::VectorXd& s) -> Eigen::VectorXd { return e * s; });
    } else {
      const DynamicsModel flow = model;
      const int n = std::max(1, static_cast<int>(std::ceil(dt / 1e-3)));
      const double h = dt / n;
      kernel = TransitionKernel::deterministic_map(
          [flow, n, h](const Eigen::VectorXd& s0) -> Eigen::VectorXd {
            Eigen::VectorXd s = s0;
            for (int i = 0; i < n; ++i) s += h * drift(flow, s);
            return s;
          });
    }
    sys = assemble_be_projection(basis, kernel, reward, beta, dt, quad, {});
  } else {
    throw CLI::ValidationError("--mode", "expected phibe or be");
  }

  const ValueApprox va = solve(sys, basis);
  std::ofstream f = open_out(out);
  write_value_grid(f, va);
  write_sidecar(out, va,
                json{{"mode", mode}, {"model", model.id()}, {"beta", beta}, {"dt", dt},
                     {"order", order}, {"reward", "cos3 design, k=1"}});
  std::cerr << "condition " << va.condition << ", residual " << va.residual << '\n';
  return 0;
}

// --------------------------------------------------------- solve-modelfree

struct DataFile {
  bool is_trajectories = false;
  std::vector<Trajectory> trajectories;       // per traj_id, with rewards column
  std::vector<Eigen::VectorXd> traj_rewards;  // aligned with trajectories
  TransitionPairs pairs;
};

// Trajectory layout: traj_id,step,s_0..s_{d-1},reward
// Pairs layout:      s_0..s_{d-1},sp_0..sp_{d-1},reward
DataFile read_data(const std::string& path, double dt) {
  std::ifstream f(path);
  if (!f) throw CLI::FileError::Missing(path);
  std::string header;
  if (!std::getline(f, header)) throw CLI::ValidationError("--data", "empty file " + path);

  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.empty() || cols.back() != "reward")
    throw CLI::ValidationError("--data", "last column must be 'reward'");

  DataFile data;
  data.is_trajectories = cols.size() >= 2 && cols[0] == "traj_id" && cols[1] == "step";

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    rows.emplace_back();
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) rows.back().push_back(std::stod(tok));
    if (rows.back().size() != cols.size())
      throw CLI::ValidationError("--data", "row with " + std::to_string(rows.back().size()) +
                                               " fields, header has " +
                                               std::to_string(cols.size()));
  }
  if (rows.empty()) throw CLI::ValidationError("--data", "no data rows in " + path);

  if (data.is_trajectories) {
    const int d = static_cast<int>(cols.size()) - 3;
    if (d < 1) throw CLI::ValidationError("--data", "no state columns");
    std::map<long long, std::vector<const std::vector<double>*>> by_id;
    for (const auto& row : rows) by_id[static_cast<long long>(row[0])].push_back(&row);
    for (auto& [id, traj_rows] : by_id) {
      std::sort(traj_rows.begin(), traj_rows.end(),
                [](const auto* a, const auto* b) { return (*a)[1] < (*b)[1]; });
      Trajectory traj;
      traj.dt = dt;
      traj.states.resize(static_cast<int>(traj_rows.size()), d);
      Eigen::VectorXd rewards(static_cast<int>(traj_rows.size()));
      for (int i = 0; i < static_cast<int>(traj_rows.size()); ++i) {
        for (int k = 0; k < d; ++k) traj.states(i, k) = (*traj_rows[i])[2 + k];
        rewards(i) = (*traj_rows[i]).back();
      }
      data.trajectories.push_back(std::move(traj));
      data.traj_rewards.push_back(std::move(rewards));
    }
  } else {
    if ((cols.size() - 1) % 2 != 0)
      throw CLI::ValidationError("--data", "pairs layout needs s_*, sp_*, reward columns");
    const int d = static_cast<int>((cols.size() - 1) / 2);
    const int n = static_cast<int>(rows.size());
    data.pairs.starts.resize(n, d);
    data.pairs.ends.resize(n, d);
    data.pairs.rewards.resize(n);
    data.pairs.dt = dt;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) {
        data.pairs.starts(i, k) = rows[i][k];
        data.pairs.ends(i, k) = rows[i][d + k];
      }
      data.pairs.rewards(i) = rows[i].back();
    }
  }
  return data;
}

int cmd_solve_modelfree(const std::string& algo, int order, const std::string& data_path,
                        const BasisSet& basis, double beta, double dt, std::uint64_t seed,
                        const std::string& out) {
  const DataFile data = read_data(data_path, dt);
  EmpiricalSystem sys(basis.p);

  if (algo == "phibe-det" || algo == "phibe-stoch") {
    if (!data.is_trajectories)
      throw CLI::ValidationError("--data", algo + " needs the trajectory layout");
    const FdCoefficients coeffs = fd_coefficients(order);
    const bool stochastic = (algo == "phibe-stoch");
    for (std::size_t i = 0; i < data.trajectories.size(); ++i)
      accumulate_phibe(sys, data.trajectories[i], data.traj_rewards[i], beta, coeffs, basis,
                       stochastic);
  } else if (algo == "phibe-pairs") {
    if (data.is_trajectories)
      throw CLI::ValidationError("--data", "phibe-pairs needs the pairs layout");
    accumulate_pairs_first_order(sys, data.pairs, beta, basis);
  } else if (algo == "lstd") {
    if (data.is_trajectories) {
      for (std::size_t i = 0; i < data.trajectories.size(); ++i)
        accumulate_lstd(sys, data.trajectories[i], data.traj_rewards[i], beta, basis);
    } else {
      accumulate_lstd_pairs(sys, data.pairs, beta, basis);
    }
  } else {
    throw CLI::ValidationError("--algo", "expected phibe-det, phibe-stoch, phibe-pairs or lstd");
  }

  const ValueApprox va = solve_empirical(sys, basis);
  std::ofstream f = open_out(out);
  write_value_grid(f, va);
  write_sidecar(out, va,
                json{{"algo", algo}, {"order", order}, {"beta", beta}, {"dt", dt}, {"seed", seed},
                     {"count", sys.count}});
  std::cerr << "windows " << sys.count << ", condition " << va.condition << '\n';
  return 0;
}

// -------------------------------------------------------------- experiment

int cmd_experiment(const ExperimentConfig& config) {
  const PresetResult res = run_preset(config);
  for (const auto& c : res.checks) {
    const char* tag = c.hard ? (c.passed ? "[PASS]     " : "[FAIL]     ")
                             : (c.passed ? "[ADVISORY] " : "[ADVISORY-MISS] ");
    std::cout << tag << c.name << ": " << c.detail << '\n';
  }
  for (const auto& e : res.cell_errors) std::cout << "[CELL-ERROR] " << e << '\n';
  std::cout << "RESULT: " << (res.ok() ? "OK" : "FAIL") << " (" << res.reports.size()
            << " error rows)" << '\n';
  return res.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PhiBE continuous-time policy evaluation toolkit"};
  app.require_subcommand(1);

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "print finite-difference weights a^(i) as CSV");
  int order = 1;
  coeffs->add_option("--order", order, "estimator order i")->required()->check(CLI::Range(1, 8));

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample trajectories to CSV");
  std::string model_name = "linear1d", params_text, out_path = "trajectories.csv";
  double dt = 0.1;
  int m = 4, n_traj = 100, substeps = 100;
  std::uint64_t seed = 0;
  sim->add_option("--model", model_name, "linear1d|nonlinear-sin1d|ou1d|cubic1d|lq10");
  sim->add_option("--params", params_text, "comma-separated key=value, e.g. lambda=0.05");
  sim->add_option("--dt", dt, "observation spacing")->required()->check(CLI::PositiveNumber);
  sim->add_option("--m", m, "transitions per trajectory");
  sim->add_option("--n-traj", n_traj, "number of trajectories");
  sim->add_option("--substeps", substeps, "Euler-Maruyama substeps when sampling is not exact");
  sim->add_option("--seed", seed, "master seed");
  std::string reward_spec;
  sim->add_option("--reward", reward_spec,
                  "append a reward column: cos3:k=1,beta=0.1 | quadratic:R=1.4 | lq10");
  sim->add_option("--out", out_path, "output CSV")->required();

  // solve-galerkin
  auto* sg = app.add_subcommand("solve-galerkin", "model-based Galerkin solve (cos^3 design)");
  std::string sg_model = "linear1d", sg_params, sg_basis = "fourier:4", sg_mode = "phibe",
              sg_out = "value.csv";
  double sg_beta = 0.1, sg_dt = 0.1;
  int sg_order = 1;
  sg->add_option("--model", sg_model, "linear1d|nonlinear-sin1d|ou1d");
  sg->add_option("--params", sg_params, "model parameters, key=value list");
  sg->add_option("--basis", sg_basis, "fourier:M|monomial:DEG|legendre:DEG");
  sg->add_option("--order", sg_order, "PhiBE estimator order")->check(CLI::Range(1, 8));
  sg->add_option("--beta", sg_beta, "discount rate")->required()->check(CLI::PositiveNumber);
  sg->add_option("--dt", sg_dt, "observation spacing")->required()->check(CLI::PositiveNumber);
  sg->add_option("--mode", sg_mode, "phibe|be");
  sg->add_option("--out", sg_out, "output CSV (sidecar written to OUT.json)")->required();

  // solve-modelfree
  auto* smf = app.add_subcommand("solve-modelfree", "least-squares solve from a data CSV");
  std::string mf_algo = "phibe-det", mf_data, mf_basis = "fourier:4", mf_out = "value.csv";
  double mf_beta = 0.1, mf_dt = 0.1;
  int mf_order = 1;
  std::uint64_t mf_seed = 0;
  smf->add_option("--algo", mf_algo, "phibe-det|phibe-stoch|phibe-pairs|lstd");
  smf->add_option("--order", mf_order, "PhiBE estimator order")->check(CLI::Range(1, 8));
  smf->add_option("--data", mf_data,
                  "CSV: traj_id,step,s_*,reward (trajectories) or s_*,sp_*,reward (pairs)")
      ->required();
  smf->add_option("--basis", mf_basis, "fourier:M|monomial:DEG|legendre:DEG|poly2:D");
  smf->add_option("--beta", mf_beta, "discount rate")->required()->check(CLI::PositiveNumber);
  smf->add_option("--dt", mf_dt, "observation spacing of the data")->required()->check(CLI::PositiveNumber);
  smf->add_option("--seed", mf_seed, "recorded in the sidecar");
  smf->add_option("--out", mf_out, "output CSV (sidecar written to OUT.json)")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a preset and write its artifacts");
  std::string preset, exp_out, config_path;
  std::vector<std::string> sets;
  exp->add_option("--preset", preset, "one of: fig1 fig3 fig4 fig5 fig6 fig7 table1 fig8 fig9");
  exp->add_option("--set", sets, "override, key=value (repeatable)");
  exp->add_option("--out", exp_out, "output directory");
  exp->add_option("--config", config_path, "JSON file mirroring ExperimentConfig");

  CLI11_PARSE(app, argc, argv);

  try {
    if (coeffs->parsed()) return cmd_coeffs(order);
    if (sim->parsed()) {
      const DynamicsModel model = make_model(model_name, params_text);
      const RewardFn reward = reward_spec.empty() ? RewardFn() : make_reward(model, reward_spec);
      return cmd_simulate(model, dt, m, n_traj, substeps, seed, reward, out_path);
    }
    if (sg->parsed())
      return cmd_solve_galerkin(sg_model, sg_params, make_basis(sg_basis), sg_order, sg_beta,
                                sg_dt, sg_mode, sg_out);
    if (smf->parsed())
      return cmd_solve_modelfree(mf_algo, mf_order, mf_data, make_basis(mf_basis), mf_beta, mf_dt,
                                 mf_seed, mf_out);
    if (exp->parsed()) {
      ExperimentConfig config;
      if (!config_path.empty()) {
        std::ifstream cf(config_path);
        if (!cf) throw CLI::FileError::Missing(config_path);
        json j = json::parse(cf);
        config.preset = j.value("preset", "");
        config.out_dir = j.value("out_dir", "");
        if (j.contains("overrides"))
          for (auto it = j["overrides"].begin(); it != j["overrides"].end(); ++it)
            config.overrides[it.key()] =
                it->is_string() ? it->get<std::string>() : it->dump();
      }
      if (!preset.empty()) config.preset = preset;
      if (!exp_out.empty()) config.out_dir = exp_out;
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
        config.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      if (config.preset.empty())
        throw CLI::ValidationError("--preset", "no preset given (flag or config file)");
      return cmd_experiment(config);
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
