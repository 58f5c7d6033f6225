#ifndef ARNN_INTEGRATOR_HPP
#define ARNN_INTEGRATOR_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "arnn/errors.hpp"
#include "arnn/plant.hpp"
#include "arnn/prototype.hpp"
#include "arnn/signals.hpp"
#include "arnn/trajectory.hpp"

namespace arnn {

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace detail

/// Classical four-stage Runge-Kutta step for x' = rhs(t, x). State may be a
/// scalar or any Eigen vector expression type.
template <typename State, typename Scalar, typename Rhs>
State rk4_step(Rhs&& rhs, const State& x, Scalar t, Scalar dt) {
  if (!(dt > Scalar(0))) {
    throw std::invalid_argument("rk4_step: dt must be positive");
  }
  const Scalar half = dt / Scalar(2);
  const State k1 = rhs(t, x);
  const State k2 = rhs(t + half, State(x + half * k1));
  const State k3 = rhs(t + half, State(x + half * k2));
  const State k4 = rhs(t + dt, State(x + dt * k3));
  State next = x + dt / Scalar(6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  if (!detail::all_finite(k1) || !detail::all_finite(k2) || !detail::all_finite(k3) ||
      !detail::all_finite(k4) || !detail::all_finite(next)) {
    throw IntegrationDiverged("rk4_step: non-finite state");
  }
  return next;
}

/// Preallocated stage buffers for repeated in-place RK4 steps on a dynamic
/// state.
struct Rk4Workspace {
  Eigen::VectorXd k1, k2, k3, k4, stage;

  explicit Rk4Workspace(Eigen::Index n)
      : k1(n), k2(n), k3(n), k4(n), stage(n) {}
};

/// In-place RK4 step; rhs(t, x, dx) writes the derivative into dx.
template <typename Rhs>
void rk4_step_inplace(Rhs&& rhs, Eigen::VectorXd& x, double t, double dt,
                      Rk4Workspace& ws) {
  const double half = dt / 2.0;
  rhs(t, x, ws.k1);
  ws.stage = x + half * ws.k1;
  rhs(t + half, ws.stage, ws.k2);
  ws.stage = x + half * ws.k2;
  rhs(t + half, ws.stage, ws.k3);
  ws.stage = x + dt * ws.k3;
  rhs(t + dt, ws.stage, ws.k4);
  x += dt / 6.0 * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
  if (!x.allFinite()) {
    throw IntegrationDiverged("rk4_step: non-finite state");
  }
}

/// Bank of N classifier subsystems, three states each. Concrete banks are the
/// convergence prototype and its sigmoid-network realisation.
class ClassifierBank {
 public:
  virtual ~ClassifierBank() = default;

  virtual int num_classes() const = 0;
  int state_dim() const { return 3 * num_classes(); }
  virtual Interval theta_bounds(int i) const = 0;

  /// dz = d/dt z given the shared inputs s(t), xi(t).
  virtual void rhs(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z,
                   Eigen::Ref<Eigen::VectorXd> dz) const = 0;

  /// False when (s, xi, z) lies outside the region where the bank's dynamics
  /// are certified.
  virtual bool in_domain(double /*s*/, double /*xi*/,
                         const Eigen::Ref<const Eigen::VectorXd>& /*z*/) const {
    return true;
  }
};

class PrototypeBank final : public ClassifierBank {
 public:
  explicit PrototypeBank(std::vector<Subsystem> subsystems);

  int num_classes() const override { return static_cast<int>(subs_.size()); }
  Interval theta_bounds(int i) const override;
  void rhs(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z,
           Eigen::Ref<Eigen::VectorXd> dz) const override;

  const Subsystem& subsystem(int i) const { return subs_.at(static_cast<std::size_t>(i)); }
  /// Concatenated init_state for all subsystems.
  Eigen::VectorXd initial_state(double shat0) const;

 private:
  std::vector<Subsystem> subs_;
};

/// The measured plant: true class, parameter and filter.
struct PlantRun {
  SignalClass cls;
  double theta = 0.0;
  PlantSpec spec;
  double s0 = 0.0;
};

struct IntegrationOptions {
  double t0 = 0.0;
  double horizon = 0.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  int record_every = 10;
  std::string config_hash;
};

/// Integrates plant and bank jointly with fixed-step RK4, so every subsystem
/// sees the same s(t). `bank` may be null (plant only). Noise is held
/// constant over each step.
Trajectory integrate_system(const PlantRun& plant, const ClassifierBank* bank,
                            const Eigen::VectorXd& z0, const InputSignal& input,
                            const IntegrationOptions& opts);

}  // namespace arnn

#endif  // ARNN_INTEGRATOR_HPP
