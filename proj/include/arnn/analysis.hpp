#ifndef ARNN_ANALYSIS_HPP
#define ARNN_ANALYSIS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arnn/integrator.hpp"
#include "arnn/prototype.hpp"
#include "arnn/signals.hpp"
#include "arnn/trajectory.hpp"

namespace arnn {

/// Function sampled on the uniform grid t0 + k dt.
struct SampledSignal {
  double t0 = 0.0;
  double dt = 1.0;
  Eigen::VectorXd values;
};

/// Window integrals int_{t_k}^{t_k + window} |v| (trapezoid rule) for every
/// grid start t_k whose window fits in the record.
std::vector<double> window_abs_integrals(const SampledSignal& v, double window);

/// Constants of z' = -phi(t, z) + u(t) + eta(t).
struct FilteredPESpec {
  double phi_min = 1.0;
  double phi_max = 1.0;
  double noise_bound = 0.0;  // Delta
  double u_inf = 0.0;
  double du_inf = 0.0;
};

struct PEReport {
  double L_window = 0.0;
  double delta_lower = 0.0;         // required int |u| over windows of length L
  double input_min_integral = 0.0;  // measured min of int |u|
  bool input_pe_ok = false;
  double condition_value = 0.0;     // (delta/L)^2 - Delta u_inf
  bool condition_ok = false;
  double L_star = 0.0;              // 0 when no window length was found
  double delta_star = 0.0;
  double lower_bound_numerator = 0.0;  // delta^2/L - Delta u_inf L
  double p = 0.0;                      // numerator / delta_star
  double p_prime = 0.0;                // p / (phi_max + du_inf)
  std::vector<double> integral_samples;
};

/// Empirical check of the filtered persistent-excitation property: verifies
/// that u is exciting over windows of length L, evaluates the excitation
/// margin condition, then finds the shortest multiple L* = jL (j <= max_multiple)
/// for which every window integral of |z| is positive, reporting that minimum
/// as delta* and the implied constant p.
PEReport verify_filtered_pe(const SampledSignal& z, const SampledSignal& u,
                            const FilteredPESpec& spec, double L, double delta,
                            int max_multiple = 8);

struct WindingBudget {
  double spent = 0.0;   // gamma * int ||e_i||_eps dt
  double budget = 0.0;  // pi - nu_x + 2 pi k'
  bool applicable = true;
  std::string warning;
};

/// Phase spent by subsystem `i` (0-based) against its winding budget.
WindingBudget winding_budget(const Trajectory& traj, const PrototypeConfig& config, int i);

struct ConvergenceReport {
  bool entered = false;
  double entry_time = 0.0;  // T'(theta), measured from t0
  double residence = 0.0;   // longest stay inside the set after entry
  double winding_spent = 0.0;
  double bound_used = 0.0;
  std::optional<int> decided_class;
};

/// Tracks dist(h_theta_i(t), E_i(true_theta)) against `bound`.
ConvergenceReport convergence_report(const Trajectory& traj, const SignalClass& cls,
                                     double true_theta, double bound, int i,
                                     const PrototypeConfig* config = nullptr);

struct SweepRow {
  double theta = 0.0;
  ConvergenceReport report;
};

struct SweepResult {
  double t_prime_max = 0.0;  // over entered rows
  bool all_entered = true;
  std::vector<SweepRow> rows;
};

/// Runs `run(theta)` for every grid point; rows that never enter are flagged
/// by all_entered = false.
SweepResult sweep_uniformity(const std::vector<double>& theta_grid,
                             const std::function<ConvergenceReport(double)>& run,
                             bool parallel = false);

struct ReturnTimes {
  std::vector<double> times;   // returns of (x_i, y_i) to its initial phase
  double max_interval = 0.0;   // longest gap, counting from t0
  double bound = 0.0;          // 2 pi / (gamma delta); +inf when delta = 0
};

/// Unwraps the rotator phase of subsystem `i` and records each completed
/// revolution (linear interpolation between records). The phase advances at
/// rate g >= gamma delta, so every gap is at most `bound`.
ReturnTimes arc_returns(const Trajectory& traj, const PrototypeConfig& config, int i);

struct BoundsReport {
  bool pass = true;
  double max_xy = 0.0;
  double xy_bound = 0.0;
  std::vector<double> max_shat;
  std::vector<double> shat_bound;
};

/// Checks the a-priori state bounds |x_i|, |y_i| <= max(1, r_i(0)) and
/// |shat_i| <= |shat_i(0)| + (max(|a|,|b|) D_theta + Delta_eta) / phi_min.
BoundsReport verify_state_bounds(const Trajectory& traj, const PrototypeBank& bank,
                                 double noise_bound, double tolerance = 1e-9);

}  // namespace arnn

#endif  // ARNN_ANALYSIS_HPP
