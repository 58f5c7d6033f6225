#ifndef ARNN_PROTOTYPE_HPP
#define ARNN_PROTOTYPE_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "arnn/plant.hpp"
#include "arnn/signals.hpp"

namespace arnn {

/// Tuned constants of one convergence-prototype subsystem.
struct PrototypeConfig {
  double gamma = 0.0;
  double a = 0.0;
  double b = 1.0;
  double epsilon = 0.0;  // dead zone, Delta_eta / phi_min
  double delta = 0.0;    // structural-stability perturbation
  double nu_x = 0.0;     // initial phase in [0, 2 pi]
  int k_prime = 0;       // winding budget
  double kappa = 2.0;
  double d = 0.5;

  /// Throws std::invalid_argument when the constants are inconsistent with
  /// the class (a < theta_min <= theta_max < b, gamma > 0, ...).
  void validate(const SignalClass& cls) const;
};

/// One subsystem of the classifier bank: the signal family it tests, its
/// tuned constants and the filter model used for shat.
struct Subsystem {
  SignalClass cls;
  PrototypeConfig config;
  ScalarMap phi;
  double phi_min = 1.0;
};

template <typename Scalar>
Scalar theta_hat(Scalar x, Scalar a, Scalar b) {
  return a + (b - a) / Scalar(2) * (x + Scalar(1));
}

/// Unit-circle normal form (x - y - x r^2, x + y - y r^2).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> circle_field(Scalar x, Scalar y) {
  const Scalar r2 = x * x + y * y;
  return {x - y - x * r2, x + y - y * r2};
}

/// Radial and angular rates of g * circle_field in polar coordinates:
/// r' = g r (1 - r^2), nu' = g.
template <typename Scalar>
std::pair<Scalar, Scalar> polar_rates(Scalar x, Scalar y, Scalar g) {
  using std::sqrt;
  const Scalar r = sqrt(x * x + y * y);
  if (r == Scalar(0)) {
    throw std::domain_error("polar_rates: origin is a singular point");
  }
  return {g * r * (Scalar(1) - r * r), g};
}

/// Rotation gain gamma (||shat - s||_eps + delta).
double rotation_gain(double shat, double s, const PrototypeConfig& cfg);

/// Right-hand side of (shat, x, y) for one subsystem; delta = 0 gives the
/// unperturbed prototype.
Eigen::Vector3d prototype_rhs(const Eigen::Vector3d& q, double s, double xi,
                              const Subsystem& sub);

/// (shat0, cos nu_x, sin nu_x).
Eigen::Vector3d init_state(const PrototypeConfig& config, double shat0);

double compute_c(double d_theta, double phi_min, double a, double b);

struct GammaTuning {
  double gamma_star = 0.0;
  double gamma = 0.0;
  bool unbounded = false;  // c == 0: any gamma is admissible
};

/// Upper bound on gamma and the operating value safety * gamma_star.
GammaTuning tune_gamma(double kappa, double d, double c, double phi_min,
                       double safety);

/// Smallest admissible h*. `gamma_op` must strictly satisfy the gamma bound;
/// throws InfeasibleTuning when the denominator is not positive.
double tune_hstar(double s_min, double s_max, double d_theta, double a,
                  double b, double phi_min, double gamma_op, double kappa,
                  double d, double c);

/// Smallest k >= 0 with 2 pi k - nu_x >= h_star.
int choose_winding(double h_star, double nu_x);

double compute_L(double T, double rho_of_span, double d_f);

struct ErrorBound {
  double value = 0.0;
  double rho_argument = 0.0;
  bool extrapolated = false;
};

/// rho^{-1}((8 Delta_eta D_theta (b - a) D_f^2 L^2)^{1/4}).
ErrorBound error_bound(double delta_eta, double d_theta, double a, double b,
                       double d_f, double L, const RhoEnvelope& rho);

struct TuningInputs {
  double d_theta = 0.0;
  double d_f = 0.0;
  double phi_min = 1.0;
  double noise_bound = 0.0;
  Interval s0_range{-1.0, 1.0};
  double a = 0.0;
  double b = 1.0;
  double window_T = 2.0 * 3.14159265358979323846;
  RhoEnvelope rho;
  double kappa = 2.0;
  double d = 0.5;
  double safety = 0.5;
  double nu_x = 0.0;
  double delta = 1e-3;
};

struct TuningReport {
  double c = 0.0;
  double gamma_star = 0.0;
  double gamma = 0.0;
  double h_star = 0.0;
  int k_prime = 0;
  double L = 0.0;
  double error_bound = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string T_L_star_note;
  std::vector<std::string> warnings;
  // Ingredients kept so that the accuracy radius can be re-evaluated for a
  // different noise level.
  double d_theta = 0.0;
  double d_f = 0.0;
  double a = 0.0;
  double b = 1.0;
  double kappa = 2.0;
  double d = 0.5;
  double nu_x = 0.0;
  RhoEnvelope rho;

  PrototypeConfig config() const;
};

/// Full tuning chain: c, gamma*, gamma, h*, k', L, accuracy bound, epsilon.
TuningReport tune_prototype(const TuningInputs& in);

}  // namespace arnn

#endif  // ARNN_PROTOTYPE_HPP
