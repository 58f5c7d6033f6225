#ifndef ARNN_SIGNALS_HPP
#define ARNN_SIGNALS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arnn {

/// Dead-zone norm: |x| - delta outside the band [-delta, delta], zero inside.
template <typename Scalar>
Scalar deadzone_norm(Scalar x, Scalar delta) {
  if (delta < Scalar(0)) {
    throw std::domain_error("deadzone_norm: negative dead-zone width");
  }
  using std::abs;
  const Scalar m = abs(x);
  return m > delta ? m - delta : Scalar(0);
}

/// Closed interval [lo, hi]; lo == hi encodes a single point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  double distance(double v) const {
    if (v < lo) return lo - v;
    if (v > hi) return v - hi;
    return 0.0;
  }
};

/// Finite union of closed intervals and points.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> parts);
  explicit IntervalSet(std::vector<Interval> parts);

  static IntervalSet point(double v) { return IntervalSet{Interval::point(v)}; }

  bool empty() const { return parts_.empty(); }
  const std::vector<Interval>& parts() const { return parts_; }
  bool contains(double v) const;

 private:
  std::vector<Interval> parts_;
};

/// inf over q in S of |x - q|.
double set_distance(double x, const IntervalSet& set);

using SignalFn = std::function<double(double xi, double theta)>;
using EquivalenceFn = std::function<IntervalSet(double theta)>;

/// One parametric signal family f_i(xi, theta) together with its declared
/// equivalence structure and regularity constants.
struct SignalClass {
  int id = 1;
  std::string name;
  SignalFn f;
  Interval theta_range;  // Omega_theta
  EquivalenceFn equivalence;
  double lipschitz_theta = 0.0;  // D_theta
  double lipschitz_xi = 0.0;     // D_xi
};

/// The known exogenous input xi(t) with its sup and slope bounds.
struct InputSignal {
  std::string name;
  std::function<double(double)> xi;
  double xi_sup = 0.0;
  double dxi_sup = 0.0;
};

InputSignal sine_input(double amplitude = 1.0, double frequency = 1.0);
InputSignal constant_input(double value);

/// Input that is silent on growing intervals: sin^2(ln(t - t0 + 1)) while
/// sin(ln(t - t0 + 1)) >= 0, zero otherwise.
InputSignal degenerate_xi(double t0);

/// Built-in families: "linear" (theta*xi), "sine" (sin(theta*xi)),
/// "quadratic-affine" (theta^2*xi + theta). Regularity constants are computed
/// for the extended parameter interval `estimation_range` ([a, b]) and inputs
/// bounded by `xi_sup`.
SignalClass make_signal_class(std::string_view name, Interval theta_range,
                              Interval estimation_range, double xi_sup,
                              int id = 1);

double eval_signal(const SignalClass& cls, const InputSignal& input,
                   double theta, double t);

struct RhoSample {
  double separation = 0.0;
  double deviation = 0.0;  // worst-window max |f(.,theta) - f(.,theta')|
};

struct PersistencyEstimate {
  double window_T = 0.0;
  std::vector<RhoSample> rho_samples;
  bool satisfied = false;
  // Start time of the window that produced the minimum, for diagnostics.
  double worst_window_start = 0.0;
};

/// Sampled check of the non-degeneracy condition for one parameter pair:
/// windows of length window_T tile [0, horizon]; the per-window max deviation
/// is minimised over windows.
PersistencyEstimate estimate_persistency(const SignalClass& cls,
                                         const InputSignal& input, double theta,
                                         double theta_prime, double window_T,
                                         double horizon, double dt);

/// Lower envelope of rho over a parameter grid: for every requested
/// separation, the minimum worst-window deviation over all grid pairs
/// (theta, theta + separation) that stay inside `range`.
PersistencyEstimate sample_rho_envelope(const SignalClass& cls,
                                        const InputSignal& input,
                                        Interval range,
                                        const std::vector<double>& separations,
                                        int n_theta, double window_T,
                                        double horizon, double dt);

/// Linear class-K-infinity lower bound rho(s) = slope * s certified on sampled
/// separations up to `certified_max`.
struct RhoEnvelope {
  double slope = 0.0;
  double certified_max = 0.0;

  double operator()(double s) const { return slope * s; }
  double inverse(double u) const;
  bool in_certified_range(double u) const { return u <= slope * certified_max; }

  static RhoEnvelope from_samples(const std::vector<RhoSample>& samples);
};

struct LipschitzGrid {
  Interval theta;  // usually [a, b]
  int n_theta = 201;
  Interval xi;  // usually [-xi_sup, xi_sup]
  int n_xi = 201;
  double tolerance = 1e-6;
};

struct LipschitzEstimate {
  double d_theta = 0.0;
  double d_xi = 0.0;
  double d_f = 0.0;  // 2 * D_xi * dxi_sup
  bool ok = true;
  std::vector<std::string> violations;
};

/// Finite-difference estimates of D_theta and D_xi on a uniform grid, plus a
/// sampled check of the generalized Lipschitz bound against the declared
/// equivalence sets.
LipschitzEstimate estimate_lipschitz(const SignalClass& cls,
                                     const InputSignal& input,
                                     const LipschitzGrid& grid);

}  // namespace arnn

#endif  // ARNN_SIGNALS_HPP
