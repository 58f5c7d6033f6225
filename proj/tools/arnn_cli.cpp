// arnn: experiment runner for the adaptive classifier bank.
//
//   arnn tune      --config cfg.json
//   arnn simulate  --config cfg.json [--theta X]
//   arnn verify    --config cfg.json --which pe|persistency|bounds
//   arnn fit-rnn   --config cfg.json [--dataset data.csv] [--no-check]
//   arnn report    --config cfg.json
//
// Exit codes: 0 ok, 1 usage or parse error, 2 infeasible tuning,
// 3 not entered, 4 verification failure.

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "arnn/errors.hpp"
#include "arnn/experiment.hpp"
#include "arnn/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kNotEntered = 3, kVerifyFailed = 4 };

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> horizon;
};

arnn::ExperimentConfig load(const Common& c) {
  auto cfg = arnn::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.dt) {
    if (!(*c.dt > 0.0)) throw arnn::ConfigError("--dt must be positive");
    cfg.simulation.dt = *c.dt;
  }
  if (c.horizon) {
    if (*c.horizon < 0.0) throw arnn::ConfigError("--horizon must be >= 0");
    cfg.simulation.horizon = *c.horizon;
  }
  if (!c.out.empty()) cfg.out_dir = c.out;
  return cfg;
}

fs::path out_dir(const arnn::Experiment& ex) {
  fs::path dir = ex.config().out_dir;
  fs::create_directories(dir);
  return dir;
}

std::string provenance(const arnn::Experiment& ex) {
  return "arnn " + std::string(arnn::kVersion) + " config_hash=" + ex.hash() +
         " seed=" + std::to_string(ex.config().seed);
}

void write_json(const fs::path& path, const json& body) {
  std::ofstream os(path);
  os << body.dump(2) << '\n';
}

json tuning_json(arnn::Experiment& ex) {
  json classes = json::array();
  const auto& tun = ex.tuning();
  for (std::size_t i = 0; i < tun.size(); ++i) {
    classes.push_back({{"class", i + 1}, {"family", ex.classes()[i].name}, {"tuning", tun[i]}});
  }
  return classes;
}

int cmd_tune(const Common& c) {
  arnn::Experiment ex(load(c));
  const json classes = tuning_json(ex);
  write_json(out_dir(ex) / "tuning.json", arnn::stamped({{"classes", classes}}, ex.hash()));
  for (const auto& cls : classes) {
    const auto& t = cls["tuning"];
    std::cout << "class " << cls["class"] << " (" << cls["family"].get<std::string>() << "): gamma_star="
              << t["gamma_star"] << " gamma=" << t["gamma"] << " h_star=" << t["h_star"]
              << " k_prime=" << t["k_prime"] << " error_bound=" << t["error_bound"] << '\n';
    for (const auto& w : t["warnings"]) std::cout << "  warning: " << w.get<std::string>() << '\n';
  }
  return kOk;
}

int cmd_simulate(const Common& c, std::optional<double> theta_opt) {
  arnn::Experiment ex(load(c));
  const double theta = theta_opt.value_or(ex.config().truth.theta);
  const auto traj = ex.simulate(theta);
  const auto dir = out_dir(ex);
  {
    std::ofstream os(dir / "trajectory.csv");
    arnn::write_csv(os, traj, provenance(ex) + " theta=" + std::to_string(theta));
  }
  const auto conv = ex.convergence(traj, theta);
  json body = conv;
  body["theta"] = theta;
  body["domain_escapes"] = traj.meta.domain_escapes;
  body["warnings"] = traj.meta.warnings;
  write_json(dir / "convergence.json", arnn::stamped(body, ex.hash()));
  std::cout << (conv.entered ? "entered at t'=" + std::to_string(conv.entry_time) : std::string("not entered"))
            << " (bound " << conv.bound_used << ")\n";
  return conv.entered ? kOk : kNotEntered;
}

int cmd_verify(const Common& c, const std::string& which) {
  arnn::Experiment ex(load(c));
  json body;
  bool pass = false;
  if (which == "pe") {
    const auto rep = ex.filtered_pe();
    body = rep;
    pass = rep.condition_ok && rep.L_star > 0.0;
  } else if (which == "persistency") {
    json classes = json::array();
    pass = true;
    for (const auto& cls : ex.classes()) {
      const auto est = ex.persistency(cls);
      classes.push_back({{"class", cls.id}, {"family", cls.name}, {"estimate", est}});
      pass = pass && est.satisfied;
    }
    body = {{"classes", classes}};
  } else {
    const double theta = ex.config().truth.theta;
    const auto traj = ex.simulate(theta);
    const auto rep = arnn::verify_state_bounds(traj, ex.bank(), ex.plant().noise_bound);
    body = rep;
    pass = rep.pass;
  }
  body["which"] = which;
  body["pass"] = pass;
  write_json(out_dir(ex) / ("verify_" + which + ".json"), arnn::stamped(body, ex.hash()));
  std::cout << which << ": " << (pass ? "pass" : "FAIL") << '\n';
  return pass ? kOk : kVerifyFailed;
}

// Rows of xi,s,shat,x,y,d_shat,d_x,d_y; '#' lines and a header row are skipped.
arnn::Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw arnn::ConfigError("cannot open dataset " + path);
  std::vector<std::array<double, 8>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::array<double, 8> r{};
    bool ok = true;
    for (auto& v : r) ok = ok && static_cast<bool>(ss >> v);
    if (ok) rows.push_back(r);
  }
  if (rows.empty()) throw arnn::ConfigError("dataset " + path + " has no rows");
  arnn::Dataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(rows.size()), 5);
  ds.targets.resize(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (int m = 0; m < 5; ++m) ds.inputs(static_cast<Eigen::Index>(k), m) = rows[k][static_cast<std::size_t>(m)];
    for (int m = 0; m < 3; ++m) ds.targets(static_cast<Eigen::Index>(k), m) = rows[k][static_cast<std::size_t>(5 + m)];
  }
  return ds;
}

int cmd_fit_dataset(const arnn::Experiment& ex, const std::string& path) {
  const auto ds = read_dataset(path);
  arnn::DomainBox box;
  box.lo = ds.inputs.colwise().minCoeff().transpose();
  box.hi = ds.inputs.colwise().maxCoeff().transpose();
  for (int k = 0; k < 5; ++k) {
    if (!(box.hi[k] > box.lo[k])) box.hi[k] = box.lo[k] + 1.0;
  }
  const auto& r = ex.config().rnn;
  arnn::FitSpec spec;
  spec.units = r.units.back();
  spec.ridge = r.ridge;
  spec.sigmoid = arnn::sigmoid_from_string(r.sigmoid);
  spec.weight_scale = r.weight_scale;
  spec.weight_scale_max = r.weight_scale_max;
  spec.max_support = r.max_support;
  spec.seed = arnn::sub_seed(ex.config().seed, "rnn-weights-dataset");
  const auto fit = arnn::fit_network(ds, ds, box, spec);
  const auto dir = out_dir(ex);
  write_json(dir / "network.json", arnn::stamped(fit.network, ex.hash()));
  write_json(dir / "fit_report.json", arnn::stamped(fit.report, ex.hash()));
  std::cout << "N=" << spec.units << " eps_N=" << fit.network.eps_N << '\n';
  return kOk;
}

int cmd_fit_rnn(const Common& c, const std::string& dataset, bool check) {
  arnn::Experiment ex(load(c));
  if (!dataset.empty()) return cmd_fit_dataset(ex, dataset);
  const auto dir = out_dir(ex);
  const double theta = ex.config().truth.theta;
  json sweep = json::array();
  bool pass = true;
  for (int units : ex.config().rnn.units) {
    const auto fit = ex.fit_rnn(units);
    json entry = {{"N", units}};
    json reports = json::array();
    for (std::size_t i = 0; i < fit.fits.size(); ++i) {
      reports.push_back(fit.fits[i].report);
      write_json(dir / ("network_N" + std::to_string(units) + "_class" + std::to_string(i + 1) + ".json"),
                 arnn::stamped(fit.fits[i].network, ex.hash()));
    }
    entry["fits"] = reports;
    std::cout << "N=" << units << " eps_N:";
    for (const auto& f : fit.fits) std::cout << ' ' << f.network.eps_N;
    if (check) {
      const auto div = ex.divergence(fit, theta);
      entry["divergence"] = {{"pass", div.pass}, {"lipschitz", div.lipschitz}, {"classes", div.reports},
                             {"horizon", ex.config().rnn.check_horizon}};
      pass = pass && div.pass;
      std::cout << " divergence " << (div.pass ? "pass" : "FAIL");
    }
    std::cout << '\n';
    sweep.push_back(entry);
  }
  write_json(dir / "fit_report.json", arnn::stamped({{"sweep", sweep}}, ex.hash()));
  return pass ? kOk : kVerifyFailed;
}

int cmd_report(const Common& c) {
  arnn::Experiment ex(load(c));
  const auto dir = out_dir(ex);
  const auto sweep = ex.sweep();
  {
    std::ofstream os(dir / "sweep.csv");
    arnn::write_sweep_csv(os, sweep, provenance(ex));
  }
  const double settle = ex.settle(sweep);
  const double theta = ex.config().truth.theta;
  const auto traj = ex.simulate(theta);
  const auto decision = ex.decide(traj, settle);
  json body = {{"tuning", tuning_json(ex)}, {"sweep", sweep},  {"settle", settle},
               {"theta", theta},             {"decision", decision}};
  write_json(dir / "report.json", arnn::stamped(body, ex.hash()));
  std::cout << "T'_max=" << sweep.t_prime_max << (sweep.all_entered ? "" : " (some runs never entered)")
            << " settle=" << settle << " decision=" << arnn::to_string(decision.status);
  if (decision.decided) std::cout << " class " << *decision.decided << " theta=" << decision.theta_estimate;
  std::cout << '\n';
  if (!sweep.all_entered) return kNotEntered;
  return decision.decided == ex.config().truth.cls ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive classifier bank: tuning, simulation, verification and network realisation"};
  app.set_version_flag("--version", std::string(arnn::kVersion));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "experiment configuration (JSON)")->required();
    sub->add_option("--out", common.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", common.seed, "top-level seed (overrides seed)");
    sub->add_option("--dt", common.dt, "integration step (overrides simulation.dt)");
    sub->add_option("--horizon", common.horizon, "simulation horizon (overrides simulation.horizon)");
  };

  auto* tune = app.add_subcommand("tune", "compute gamma, h*, k', L and the accuracy bound");
  add_common(tune);

  std::optional<double> theta;
  auto* simulate = app.add_subcommand("simulate", "simulate the plant and prototype bank");
  add_common(simulate);
  simulate->add_option("--theta", theta, "true parameter (overrides truth.theta)");

  std::string which = "pe";
  auto* verify = app.add_subcommand("verify", "run one of the numerical verifiers");
  add_common(verify);
  verify->add_option("--which", which, "pe | persistency | bounds")
      ->check(CLI::IsMember({"pe", "persistency", "bounds"}));

  std::string dataset;
  bool no_check = false;
  auto* fit = app.add_subcommand("fit-rnn", "fit sigmoid networks and check the divergence bound");
  add_common(fit);
  fit->add_option("--dataset", dataset, "fit one network to a CSV of xi,s,shat,x,y,d_shat,d_x,d_y rows");
  fit->add_flag("--no-check", no_check, "skip the divergence check");

  auto* report = app.add_subcommand("report", "sweep, settle time and decision for the configured run");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (tune->parsed()) return cmd_tune(common);
    if (simulate->parsed()) return cmd_simulate(common, theta);
    if (verify->parsed()) return cmd_verify(common, which);
    if (fit->parsed()) return cmd_fit_rnn(common, dataset, !no_check);
    if (report->parsed()) return cmd_report(common);
  } catch (const arnn::InfeasibleTuning& e) {
    std::cerr << "infeasible tuning: " << e.what() << '\n';
    return kInfeasible;
  } catch (const arnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kUsage;
}
