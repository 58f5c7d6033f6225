#include "arnn/prototype.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "arnn/errors.hpp"

namespace arnn {

void PrototypeConfig::validate(const SignalClass& cls) const {
  std::ostringstream err;
  if (!(gamma > 0.0) || !std::isfinite(gamma)) err << "gamma must be positive and finite; ";
  if (!(a < cls.theta_range.lo)) err << "a must be below theta_min; ";
  if (!(b > cls.theta_range.hi)) err << "b must be above theta_max; ";
  if (epsilon < 0.0) err << "epsilon must be non-negative; ";
  if (delta < 0.0) err << "delta must be non-negative; ";
  if (nu_x < 0.0 || nu_x > 2.0 * std::numbers::pi) err << "nu_x must lie in [0, 2 pi]; ";
  if (k_prime < 0) err << "k' must be non-negative; ";
  if (!(kappa > 1.0)) err << "kappa must exceed 1; ";
  if (!(d > 0.0 && d < 1.0)) err << "d must lie in (0, 1); ";
  const std::string msg = err.str();
  if (!msg.empty()) {
    throw std::invalid_argument("PrototypeConfig for class '" + cls.name + "': " + msg);
  }
}

double rotation_gain(double shat, double s, const PrototypeConfig& cfg) {
  return cfg.gamma * (deadzone_norm(shat - s, cfg.epsilon) + cfg.delta);
}

Eigen::Vector3d prototype_rhs(const Eigen::Vector3d& q, double s, double xi,
                              const Subsystem& sub) {
  const auto& cfg = sub.config;
  const double shat = q[0];
  const double theta = theta_hat(q[1], cfg.a, cfg.b);
  const double g = rotation_gain(shat, s, cfg);
  const Eigen::Vector2d field = circle_field(q[1], q[2]);
  return {-sub.phi(shat) + sub.cls.f(xi, theta), g * field[0], g * field[1]};
}

Eigen::Vector3d init_state(const PrototypeConfig& config, double shat0) {
  return {shat0, std::cos(config.nu_x), std::sin(config.nu_x)};
}

double compute_c(double d_theta, double phi_min, double a, double b) {
  if (!(phi_min > 0.0) || !(b > a)) {
    throw std::invalid_argument("compute_c: need phi_min > 0 and b > a");
  }
  return d_theta / phi_min * (b - a) / 2.0;
}

namespace {

// ln(kappa/d) * kappa/(kappa-1) * (2 + kappa/(1-d))
double gamma_denominator(double kappa, double d) {
  return std::log(kappa / d) * kappa / (kappa - 1.0) * (2.0 + kappa / (1.0 - d));
}

void check_kappa_d(double kappa, double d) {
  if (!(kappa > 1.0) || !(d > 0.0 && d < 1.0)) {
    throw std::invalid_argument("tuning: need kappa > 1 and d in (0, 1)");
  }
}

}  // namespace

GammaTuning tune_gamma(double kappa, double d, double c, double phi_min,
                       double safety) {
  check_kappa_d(kappa, d);
  if (!(safety > 0.0 && safety < 1.0) || !(phi_min > 0.0) || c < 0.0) {
    throw std::invalid_argument("tune_gamma: need safety in (0,1), phi_min > 0, c >= 0");
  }
  GammaTuning out;
  if (c == 0.0) {
    out.unbounded = true;
    out.gamma_star = std::numeric_limits<double>::infinity();
    out.gamma = std::numeric_limits<double>::infinity();
    return out;
  }
  out.gamma_star = phi_min / c / gamma_denominator(kappa, d);
  out.gamma = safety * out.gamma_star;
  return out;
}

double tune_hstar(double s_min, double s_max, double d_theta, double a,
                  double b, double phi_min, double gamma_op, double kappa,
                  double d, double c) {
  check_kappa_d(kappa, d);
  const double numerator = (s_max - s_min) + d_theta * (b - a) / phi_min;
  const double denominator = phi_min / gamma_op / std::log(kappa / d) * (kappa - 1.0) / kappa -
                             c * (2.0 + kappa / (1.0 - d));
  if (!(denominator > 0.0)) {
    std::ostringstream os;
    os << "tune_hstar: infeasible tuning (denominator " << denominator
       << " <= 0); choose a smaller gamma*";
    throw InfeasibleTuning(os.str());
  }
  return numerator / denominator;
}

int choose_winding(double h_star, double nu_x) {
  if (h_star < 0.0) {
    throw std::invalid_argument("choose_winding: h_star must be non-negative");
  }
  int k = 0;
  while (2.0 * std::numbers::pi * k - nu_x < h_star) ++k;
  return k;
}

double compute_L(double T, double rho_of_span, double d_f) {
  if (!(d_f > 0.0)) {
    throw std::invalid_argument("compute_L: D_f must be positive (degenerate signal family)");
  }
  return std::max(2.0 * T, rho_of_span / d_f);
}

ErrorBound error_bound(double delta_eta, double d_theta, double a, double b,
                       double d_f, double L, const RhoEnvelope& rho) {
  if (delta_eta < 0.0) {
    throw std::invalid_argument("error_bound: negative noise level");
  }
  ErrorBound out;
  out.rho_argument = std::pow(8.0 * delta_eta * d_theta * (b - a) * d_f * d_f * L * L, 0.25);
  out.value = rho.inverse(out.rho_argument);
  out.extrapolated = !rho.in_certified_range(out.rho_argument);
  return out;
}

PrototypeConfig TuningReport::config() const {
  PrototypeConfig cfg;
  cfg.gamma = gamma;
  cfg.a = a;
  cfg.b = b;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.nu_x = nu_x;
  cfg.k_prime = k_prime;
  cfg.kappa = kappa;
  cfg.d = d;
  return cfg;
}

TuningReport tune_prototype(const TuningInputs& in) {
  TuningReport rep;
  rep.d_theta = in.d_theta;
  rep.d_f = in.d_f;
  rep.a = in.a;
  rep.b = in.b;
  rep.kappa = in.kappa;
  rep.d = in.d;
  rep.nu_x = in.nu_x;
  rep.rho = in.rho;
  rep.delta = in.delta;
  rep.epsilon = in.noise_bound / in.phi_min;

  rep.c = compute_c(in.d_theta, in.phi_min, in.a, in.b);
  const GammaTuning g = tune_gamma(in.kappa, in.d, rep.c, in.phi_min, in.safety);
  rep.gamma_star = g.gamma_star;
  rep.gamma = g.gamma;
  if (g.unbounded) {
    rep.warnings.push_back("c = 0: gamma is unconstrained by the convergence condition");
    rep.h_star = 0.0;
  } else {
    rep.h_star = tune_hstar(in.s0_range.lo, in.s0_range.hi, in.d_theta, in.a, in.b,
                            in.phi_min, rep.gamma, in.kappa, in.d, rep.c);
  }
  rep.k_prime = choose_winding(rep.h_star, in.nu_x);
  rep.L = compute_L(in.window_T, in.rho(in.b - in.a), in.d_f);
  const ErrorBound eb = error_bound(in.noise_bound, in.d_theta, in.a, in.b, in.d_f, rep.L, in.rho);
  rep.error_bound = eb.value;
  if (eb.extrapolated) {
    rep.warnings.push_back("accuracy bound extrapolates rho beyond its certified range");
  }
  rep.T_L_star_note =
      "L* and delta* are certified empirically by the filtered-PE scan; "
      "T'_max by the uniformity sweep";
  return rep;
}

}  // namespace arnn
