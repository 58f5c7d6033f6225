// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance <configs dir> [<cli binary> <scratch dir>]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "arnn/errors.hpp"
#include "arnn/experiment.hpp"

using namespace arnn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string dir;
std::string cli;
std::string scratch;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Outcome state_count() {
  for (const char* name : {"linear_single.json", "three_class.json"}) {
    Experiment ex(load_config(dir + "/" + name));
    const int n = static_cast<int>(ex.classes().size());
    const auto& bank = ex.bank();
    if (bank.state_dim() != 3 * n || bank.initial_state(0.0).size() != 3 * n) {
      return {false, std::string(name) + ": state size mismatch"};
    }
    ExperimentConfig cfg = ex.config();
    cfg.simulation.horizon = 1.0;
    Experiment shortrun(cfg);
    const Trajectory t = shortrun.simulate(cfg.truth.theta);
    if (t.states.cols() != 1 + 3 * n) return {false, std::string(name) + ": trajectory width mismatch"};
  }
  return {true, "bank states = 3 N_f for N_f = 1, 3"};
}

Outcome contraction() {
  const auto cls = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
  double worst = -1.0;
  // Filters with valid slope bounds only.
  for (const char* phi : {"identity", "affine-sine"}) {
    PlantSpec spec = default_plant_spec(0.0);
    const auto f = make_phi(phi);
    spec.phi = f.phi;
    spec.phi_min = f.slope_min;
    spec.phi_max = f.slope_max;
    const double s1 = 1.0, s2 = -0.5;
    const auto a = simulate_measurement(cls, sine_input(), 1.3, spec, s1, 0.0, 10.0, 1e-3, 1);
    const auto b = simulate_measurement(cls, sine_input(), 1.3, spec, s2, 0.0, 10.0, 1e-3, 1);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double excess = std::abs(a.s(k) - b.s(k)) - std::exp(-spec.phi_min * a.times[k]) * std::abs(s1 - s2);
      worst = std::max(worst, excess);
    }
  }
  return {worst <= 1e-6, "max excess over envelope " + fmt(worst)};
}

Outcome polar() {
  const auto cls = make_signal_class("linear", {0.5, 2.0}, {0.25, 2.25}, 1.0);
  PrototypeConfig cfg;
  cfg.gamma = 0.03;
  cfg.a = 0.25;
  cfg.b = 2.25;
  cfg.delta = 1e-3;
  cfg.epsilon = 1e-4;
  const Subsystem sub{cls, cfg, [](double s) { return s; }, 1.0};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Eigen::Vector3d q(u(rng), u(rng), u(rng));
    const double s = u(rng), xi = u(rng);
    const Eigen::Vector3d dq = prototype_rhs(q, s, xi, sub);
    const double g = rotation_gain(q[0], s, cfg);
    const double r = std::hypot(q[1], q[2]);
    const double nu = std::atan2(q[2], q[1]);
    const double dr = g * r * (1.0 - r * r);
    const double dnu = g;
    const double dx = dr * std::cos(nu) - r * dnu * std::sin(nu);
    const double dy = dr * std::sin(nu) + r * dnu * std::cos(nu);
    worst = std::max({worst, std::abs(dq[1] - dx), std::abs(dq[2] - dy)});
  }
  return {worst < 1e-12, "max |cartesian - polar| " + fmt(worst)};
}

Outcome tuning_formulas() {
  // kappa 2, d 1/2, phi_min 1. gamma*: c = 1. h*: unit spans, D_theta 1, c = 1/2, gamma 0.06.
  const double gamma_oracle = 1.0 / (std::log(4.0) * 2.0 * (2.0 + 2.0 / 0.5));
  const double hstar_oracle = (1.0 + 1.0) / (1.0 / 0.06 / std::log(4.0) * 0.5 - 0.5 * (2.0 + 4.0));
  const double g = tune_gamma(2.0, 0.5, 1.0, 1.0, 0.5).gamma_star;
  const double h = tune_hstar(0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.06, 2.0, 0.5, 0.5);
  const bool ok = std::abs(g - gamma_oracle) < 1e-9 && std::abs(h - hstar_oracle) < 1e-9 &&
                  std::floor(g * 1e5) == 6011.0 && std::floor(h * 1e3) == 664.0;
  std::ostringstream os;
  os.precision(12);
  os << "gamma* " << g << ", h* " << h;
  return {ok, os.str()};
}

Outcome winding() {
  Experiment ex(load_config(dir + "/linear_single.json"));
  const double theta = ex.config().truth.theta;
  const Trajectory traj = ex.simulate(theta);
  const WindingBudget wb = winding_budget(traj, ex.bank().subsystem(0).config, 0);
  const bool ok = wb.applicable && wb.spent <= wb.budget;
  return {ok, "spent " + fmt(wb.spent) + " of " + fmt(wb.budget)};
}

// Shared by criteria 6 and 10.
std::optional<Experiment> three;
double three_settle = 0.0;

Outcome sweep_decisions() {
  three.emplace(load_config(dir + "/three_class.json"));
  Experiment& ex = *three;
  std::map<double, Trajectory> runs;
  const SweepResult sweep = sweep_uniformity(ex.sweep_grid(), [&](double theta) {
    auto [it, _] = runs.insert_or_assign(theta, ex.simulate(theta));
    return ex.convergence(it->second, theta);
  });
  if (!sweep.all_entered || !std::isfinite(sweep.t_prime_max)) {
    return {false, "some sweep point never entered its target set"};
  }
  three_settle = ex.settle(sweep);
  const SignalClass& cls = ex.truth_class();
  double worst = 0.0;
  double bound = 0.0;
  for (const auto& [theta, traj] : runs) {
    const DecisionReport rep = ex.decide(traj, three_settle);
    bound = rep.band_theta;
    if (rep.status != DecisionStatus::Decided || rep.decided != cls.id) {
      return {false, "theta " + fmt(theta) + ": " + to_string(rep.status)};
    }
    worst = std::max(worst, set_distance(rep.theta_estimate, cls.equivalence(theta)));
  }
  return {worst <= bound, "11/11 decided class 2, max theta error " + fmt(worst) + " <= " + fmt(bound) +
                              ", T'max " + fmt(sweep.t_prime_max)};
}

Outcome return_time() {
  Experiment ex(load_config(dir + "/perturbed_single.json"));
  const Trajectory traj = ex.simulate(ex.config().truth.theta);
  const ReturnTimes rt = arc_returns(traj, ex.bank().subsystem(0).config, 0);
  const bool ok = rt.times.size() >= 2 && rt.max_interval <= 1.01 * rt.bound;
  return {ok, std::to_string(rt.times.size()) + " returns, longest gap " + fmt(rt.max_interval) +
                  " vs 2 pi/(gamma delta) " + fmt(rt.bound)};
}

Outcome filtered_pe() {
  ExperimentConfig cfg = load_config(dir + "/three_class.json");
  const PEReport good = Experiment(cfg).filtered_pe();
  cfg.plant.noise_bound = 1.0;
  const PEReport bad = Experiment(cfg).filtered_pe();
  const bool ok = good.input_pe_ok && good.condition_ok && good.L_star > 0.0 && good.delta_star > 0.0 &&
                  !bad.condition_ok;
  return {ok, "delta* " + fmt(good.delta_star) + " over L* " + fmt(good.L_star) +
                  "; large noise condition " + fmt(bad.condition_value)};
}

int run_cli(const std::string& args) {
  const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome degenerate() {
  Experiment ex(load_config(dir + "/degenerate_input.json"));
  const PersistencyEstimate est = ex.persistency(ex.truth_class());
  double worst = 0.0;
  for (const auto& s : est.rho_samples) worst = std::max(worst, s.deviation);
  bool ok = !est.satisfied && worst < 1e-6;
  std::string detail = "max late-window deviation " + fmt(worst);
  if (!cli.empty()) {
    const int code = run_cli("verify --which persistency --config " + dir + "/degenerate_input.json --out " +
                             scratch + "/degenerate");
    ok = ok && code == 4;
    detail += ", verify exit " + std::to_string(code);
  }
  return {ok, detail};
}

Outcome rnn() {
  if (!three) return {false, "needs the three-class sweep"};
  Experiment& ex = *three;
  const RnnFit fit = ex.fit_rnn(400);
  const double theta = ex.config().truth.theta;
  const DivergenceSummary div = ex.divergence(fit, theta);
  double eps = 0.0;
  for (int i = 0; i < fit.bank.num_classes(); ++i) eps = std::max(eps, fit.bank.network(i).eps_N);

  const double horizon = ex.config().simulation.horizon;
  const DecisionReport proto = ex.decide(ex.simulate(theta), three_settle);
  const DecisionReport net = ex.decide(ex.simulate_rnn(fit.bank, theta, horizon), three_settle);
  const bool match = proto.status == net.status && proto.decided == net.decided;
  auto name = [](const DecisionReport& r) {
    return r.decided ? "class " + std::to_string(*r.decided) : to_string(r.status);
  };
  return {div.pass && match, "eps_N " + fmt(eps) + ", divergence " + (div.pass ? "ok" : "violated") +
                                 ", prototype " + name(proto) + " vs network " + name(net)};
}

Outcome rk4_order() {
  // s' = -s + sin t, s(0) = 0: s = (sin t - cos t + e^-t) / 2.
  auto err = [](double dt) {
    double s = 0.0, t = 0.0;
    const int n = static_cast<int>(std::llround(10.0 / dt));
    for (int k = 0; k < n; ++k, t = k * dt) {
      s = rk4_step([](double tt, double x) { return -x + std::sin(tt); }, s, t, dt);
    }
    return std::abs(s - 0.5 * (std::sin(10.0) - std::cos(10.0) + std::exp(-10.0)));
  };
  const double ratio = err(0.1) / err(0.05);
  return {std::abs(ratio - 16.0) <= 0.3 * 16.0, "error ratio " + fmt(ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <configs dir> [<cli binary> <scratch dir>]\n";
    return 1;
  }
  dir = argv[1];
  if (argc >= 4) {
    cli = argv[2];
    scratch = argv[3];
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"state count", state_count},
      {"filter contraction", contraction},
      {"polar equivalence", polar},
      {"tuning formulas", tuning_formulas},
      {"winding budget", winding},
      {"sweep decisions", sweep_decisions},
      {"perturbed return time", return_time},
      {"filtered persistent excitation", filtered_pe},
      {"degenerate input", degenerate},
      {"network realization", rnn},
      {"integrator order", rk4_order},
  };

  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : checks) {
    ++n;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("%s %2d %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", n, name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
