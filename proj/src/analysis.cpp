#include "arnn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace arnn {

std::vector<double> window_abs_integrals(const SampledSignal& v, double window) {
  if (!(v.dt > 0.0) || !(window > 0.0)) {
    throw std::invalid_argument("window_abs_integrals: need dt > 0 and window > 0");
  }
  const Eigen::Index n = v.values.size();
  const double steps = window / v.dt;
  auto w = static_cast<Eigen::Index>(std::floor(steps + 1e-9));
  // Fraction of one more step, integrated on the linear interpolant.
  double frac = steps - static_cast<double>(w);
  if (frac < 1e-9) frac = 0.0;
  const Eigen::Index reach = w + (frac > 0.0 ? 1 : 0);
  std::vector<double> out;
  if (n == 0 || reach < 1 || reach >= n) return out;

  // prefix[k] = trapezoid integral of |v| over [t0, t0 + k dt]
  std::vector<double> prefix(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index k = 1; k < n; ++k) {
    prefix[static_cast<std::size_t>(k)] =
        prefix[static_cast<std::size_t>(k - 1)] +
        0.5 * v.dt * (std::abs(v.values[k - 1]) + std::abs(v.values[k]));
  }
  out.reserve(static_cast<std::size_t>(n - reach));
  for (Eigen::Index k = 0; k + reach < n; ++k) {
    double integral = prefix[static_cast<std::size_t>(k + w)] - prefix[static_cast<std::size_t>(k)];
    if (frac > 0.0) {
      const double lo = std::abs(v.values[k + w]);
      const double hi = std::abs(v.values[k + w + 1]);
      integral += frac * v.dt * (lo + 0.5 * frac * (hi - lo));
    }
    out.push_back(integral);
  }
  return out;
}

PEReport verify_filtered_pe(const SampledSignal& z, const SampledSignal& u,
                            const FilteredPESpec& spec, double L, double delta,
                            int max_multiple) {
  if (z.values.size() != u.values.size() || z.dt != u.dt || z.t0 != u.t0) {
    throw std::invalid_argument("verify_filtered_pe: z and u are not on a common grid");
  }
  if (!(L > 0.0) || max_multiple < 1) {
    throw std::invalid_argument("verify_filtered_pe: need L > 0 and max_multiple >= 1");
  }
  PEReport rep;
  rep.L_window = L;
  rep.delta_lower = delta;

  const auto u_windows = window_abs_integrals(u, L);
  if (u_windows.empty()) {
    throw std::invalid_argument("verify_filtered_pe: record shorter than one window");
  }
  rep.input_min_integral = *std::min_element(u_windows.begin(), u_windows.end());
  // Trapezoid error of a Lipschitz integrand: du_inf dt^2 / 4 per step.
  const double quadrature = spec.du_inf * u.dt * L / 4.0 + 1e-12 * std::max(1.0, delta);
  rep.input_pe_ok = rep.input_min_integral >= delta - quadrature;

  rep.condition_value = (delta / L) * (delta / L) - spec.noise_bound * spec.u_inf;
  rep.condition_ok = rep.input_pe_ok && rep.condition_value > 0.0;
  rep.lower_bound_numerator = delta * delta / L - spec.noise_bound * spec.u_inf * L;

  for (int j = 1; j <= max_multiple; ++j) {
    auto samples = window_abs_integrals(z, j * L);
    if (samples.empty()) break;
    const double lowest = *std::min_element(samples.begin(), samples.end());
    rep.integral_samples = std::move(samples);
    if (lowest > 0.0) {
      rep.L_star = j * L;
      rep.delta_star = lowest;
      break;
    }
  }
  if (rep.delta_star > 0.0 && rep.lower_bound_numerator > 0.0) {
    rep.p = rep.lower_bound_numerator / rep.delta_star;
    rep.p_prime = rep.p / (spec.phi_max + spec.du_inf);
  }
  return rep;
}

namespace {

void check_class_index(const Trajectory& traj, int i) {
  if (i < 0 || i >= traj.num_classes()) {
    throw std::out_of_range("class index outside the trajectory's bank");
  }
}

}  // namespace

WindingBudget winding_budget(const Trajectory& traj, const PrototypeConfig& config, int i) {
  check_class_index(traj, i);
  WindingBudget wb;
  wb.budget = std::numbers::pi - config.nu_x + 2.0 * std::numbers::pi * config.k_prime;
  if (config.delta > 0.0) {
    wb.applicable = false;
    wb.warning = "perturbed run (delta > 0): the winding budget does not apply";
  }
  const double h = traj.spacing();
  const auto col = 1 + 3 * i;
  double prev = deadzone_norm(traj.states(0, col) - traj.states(0, 0), config.epsilon);
  for (Eigen::Index k = 1; k < traj.states.rows(); ++k) {
    const double cur = deadzone_norm(traj.states(k, col) - traj.states(k, 0), config.epsilon);
    wb.spent += 0.5 * h * (prev + cur);
    prev = cur;
  }
  wb.spent *= config.gamma;
  return wb;
}

ConvergenceReport convergence_report(const Trajectory& traj, const SignalClass& cls,
                                     double true_theta, double bound, int i,
                                     const PrototypeConfig* config) {
  check_class_index(traj, i);
  if (!(bound > 0.0)) {
    throw std::invalid_argument("convergence_report: bound must be positive");
  }
  ConvergenceReport rep;
  rep.bound_used = bound;
  if (traj.size() == 0) return rep;

  const IntervalSet target = cls.equivalence(true_theta);
  const double t0 = traj.times.front();
  std::optional<double> run_start;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const bool inside =
        set_distance(traj.htheta(static_cast<Eigen::Index>(k), i), target) <= bound;
    if (inside) {
      if (!rep.entered) {
        rep.entered = true;
        rep.entry_time = traj.times[k] - t0;
      }
      if (!run_start) run_start = traj.times[k];
      rep.residence = std::max(rep.residence, traj.times[k] - *run_start);
    } else {
      run_start.reset();
    }
  }
  if (config) rep.winding_spent = winding_budget(traj, *config, i).spent;
  return rep;
}

SweepResult sweep_uniformity(const std::vector<double>& theta_grid,
                             const std::function<ConvergenceReport(double)>& run,
                             bool parallel) {
  if (theta_grid.empty()) {
    throw std::invalid_argument("sweep_uniformity: empty grid");
  }
  SweepResult res;
  res.rows.reserve(theta_grid.size());
  if (parallel) {
    std::vector<std::future<ConvergenceReport>> jobs;
    for (double th : theta_grid) jobs.push_back(std::async(std::launch::async, run, th));
    for (std::size_t k = 0; k < jobs.size(); ++k) res.rows.push_back({theta_grid[k], jobs[k].get()});
  } else {
    for (double th : theta_grid) res.rows.push_back({th, run(th)});
  }
  for (const auto& row : res.rows) {
    if (row.report.entered) {
      res.t_prime_max = std::max(res.t_prime_max, row.report.entry_time);
    } else {
      res.all_entered = false;
    }
  }
  return res;
}

ReturnTimes arc_returns(const Trajectory& traj, const PrototypeConfig& config, int i) {
  check_class_index(traj, i);
  ReturnTimes rt;
  const double two_pi = 2.0 * std::numbers::pi;
  const double rate = config.gamma * config.delta;
  rt.bound = rate > 0.0 ? two_pi / rate : std::numeric_limits<double>::infinity();
  if (traj.size() < 2) return rt;

  const auto col = 2 + 3 * i;
  auto angle = [&](Eigen::Index k) { return std::atan2(traj.states(k, col + 1), traj.states(k, col)); };
  double prev_phase = 0.0;
  double prev_angle = angle(0);
  double last = traj.times.front();
  int next_turn = 1;
  for (Eigen::Index k = 1; k < traj.states.rows(); ++k) {
    const double a = angle(k);
    const double phase = prev_phase + std::remainder(a - prev_angle, two_pi);
    while (phase >= next_turn * two_pi) {
      const double w = (next_turn * two_pi - prev_phase) / (phase - prev_phase);
      const double t = traj.times[k - 1] + w * (traj.times[k] - traj.times[k - 1]);
      rt.times.push_back(t);
      rt.max_interval = std::max(rt.max_interval, t - last);
      last = t;
      ++next_turn;
    }
    prev_phase = phase;
    prev_angle = a;
  }
  return rt;
}

BoundsReport verify_state_bounds(const Trajectory& traj, const PrototypeBank& bank,
                                 double noise_bound, double tolerance) {
  if (traj.num_classes() != bank.num_classes() || traj.size() == 0) {
    throw std::invalid_argument("verify_state_bounds: trajectory does not match bank");
  }
  BoundsReport rep;
  for (int i = 0; i < bank.num_classes(); ++i) {
    const auto& sub = bank.subsystem(i);
    const auto& cfg = sub.config;
    const Eigen::Vector3d q0 = traj.q(0, i);
    const double xy_bound = std::max(1.0, std::hypot(q0[1], q0[2]));
    const double shat_bound =
        std::abs(q0[0]) +
        (std::max(std::abs(cfg.a), std::abs(cfg.b)) * sub.cls.lipschitz_theta + noise_bound) /
            sub.phi_min;
    const auto col = 1 + 3 * i;
    const double max_shat = traj.states.col(col).cwiseAbs().maxCoeff();
    const double max_xy = std::max(traj.states.col(col + 1).cwiseAbs().maxCoeff(),
                                   traj.states.col(col + 2).cwiseAbs().maxCoeff());
    rep.max_shat.push_back(max_shat);
    rep.shat_bound.push_back(shat_bound);
    rep.max_xy = std::max(rep.max_xy, max_xy);
    rep.xy_bound = std::max(rep.xy_bound, xy_bound);
    if (max_xy > xy_bound + tolerance || max_shat > shat_bound + tolerance) rep.pass = false;
  }
  return rep;
}

}  // namespace arnn
