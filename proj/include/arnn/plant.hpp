#ifndef ARNN_PLANT_HPP
#define ARNN_PLANT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "arnn/signals.hpp"
#include "arnn/trajectory.hpp"

namespace arnn {

using ScalarMap = std::function<double(double)>;

/// Measurement filter s' = -phi(s) + f(xi, theta) + eta(t).
struct PlantSpec {
  ScalarMap phi;
  double phi_min = 1.0;
  double phi_max = 1.0;
  Interval s0_range{-1.0, 1.0};  // Omega_s
  double noise_bound = 0.0;      // Delta_eta
  // Explicit noise realisation. When empty, the integrator draws seeded
  // uniform noise in [-noise_bound, noise_bound], held constant per step.
  ScalarMap noise;
};

struct FilterNonlinearity {
  ScalarMap phi;
  double slope_min = 1.0;
  double slope_max = 1.0;
};

/// Named filter nonlinearities: "identity" (s), "affine-sine"
/// (2s + 0.1 sin s), "cubic" (s^3, not admissible; used to exercise
/// verify_slope_bounds).
FilterNonlinearity make_phi(std::string_view name);

PlantSpec default_plant_spec(double noise_bound = 0.0);

/// Piecewise-constant noise read from (t, eta) samples; eta(t) is the value
/// of the last sample at or before t (the first sample before the table).
ScalarMap piecewise_constant_noise(std::vector<std::pair<double, double>> table);
ScalarMap load_noise_csv(const std::string& path);

double plant_rhs(double s, double t, const SignalClass& cls,
                 const InputSignal& input, double theta, const PlantSpec& spec,
                 double eta);
/// Uses spec.noise(t) when present, zero otherwise.
double plant_rhs(double s, double t, const SignalClass& cls,
                 const InputSignal& input, double theta, const PlantSpec& spec);

/// Fixed-step RK4 integration of the plant alone, recording every step.
Trajectory simulate_measurement(const SignalClass& cls, const InputSignal& input,
                                double theta, const PlantSpec& spec, double s0,
                                double t0, double horizon, double dt,
                                std::uint64_t seed);

struct SlopeViolation {
  double u = 0.0;
  double slope = 0.0;
};

struct SlopeReport {
  bool pass = true;
  double observed_min = 0.0;
  double observed_max = 0.0;
  std::vector<SlopeViolation> violations;
};

/// Finite-difference slope sweep of phi over `range`.
SlopeReport verify_slope_bounds(const PlantSpec& spec, Interval range,
                                int points = 2001, double tolerance = 1e-6);

/// Checks |noise(t)| <= noise_bound on a uniform time grid (no-op for seeded
/// noise, which is bounded by construction).
bool verify_noise_bound(const PlantSpec& spec, double horizon, double dt);

}  // namespace arnn

#endif  // ARNN_PLANT_HPP
