#ifndef ARNN_CLASSIFIER_HPP
#define ARNN_CLASSIFIER_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arnn/prototype.hpp"
#include "arnn/trajectory.hpp"

namespace arnn {

struct Readout {
  Eigen::VectorXd hf;      // s - zeta_{i,1}
  Eigen::VectorXd htheta;  // a_i + (b_i - a_i)/2 (zeta_{i,2} + 1)
};

/// Memoryless read-out maps for a bank state z = zeta_1 (+) ... (+) zeta_N.
Readout readout(const Eigen::Ref<const Eigen::VectorXd>& z, double s,
                const std::vector<Interval>& theta_bounds);

enum class DecisionStatus { Decided, Undecided, Ambiguous };

std::string to_string(DecisionStatus status);

struct ClassSummary {
  double window_max_hf = 0.0;  // sup |h_f| over the reported window
  double theta_mean = 0.0;     // mean h_theta over the reported window
  double theta_min = 0.0;      // over the whole run
  double theta_max = 0.0;
  double theta_final = 0.0;
};

struct DecisionReport {
  std::optional<int> decided;  // 1-based position in the bank
  double theta_estimate = 0.0;
  double t_prime = 0.0;
  double T_star = 0.0;
  double band_hf = 0.0;
  double band_theta = 0.0;
  DecisionStatus status = DecisionStatus::Undecided;
  std::vector<int> qualifying;  // 1-based classes meeting the band at t_prime
  std::vector<ClassSummary> per_class;
};

/// Earliest t' in [t0, t0 + settle) at which some class keeps |h_f| below
/// eps + noise_band over [t', t' + T_star]. One such class: decided, with the
/// theta estimate averaged over the window. Several: ambiguous (no
/// tie-breaking). None: undecided.
DecisionReport decide(const Trajectory& traj, double T_star, double eps,
                      double noise_band, double settle);

struct NoiseBands {
  double hf = 0.0;     // Delta_eta / phi_min
  double theta = 0.0;  // accuracy radius from the tuning constants
};

NoiseBands band_from_noise(double delta_eta, double phi_min,
                           const TuningReport& tuning);

}  // namespace arnn

#endif  // ARNN_CLASSIFIER_HPP
