#ifndef ARNN_RNN_HPP
#define ARNN_RNN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "arnn/integrator.hpp"
#include "arnn/prototype.hpp"
#include "arnn/trajectory.hpp"

namespace arnn {

enum class Sigmoid { Logistic, Tanh };

std::string to_string(Sigmoid s);
Sigmoid sigmoid_from_string(std::string_view name);

/// Axis-aligned box over the network input (xi, s, shat, x, y).
struct DomainBox {
  Eigen::Matrix<double, 5, 1> lo = Eigen::Matrix<double, 5, 1>::Constant(-1.0);
  Eigen::Matrix<double, 5, 1> hi = Eigen::Matrix<double, 5, 1>::Constant(1.0);

  bool contains(const Eigen::Matrix<double, 5, 1>& p) const;
  Eigen::Matrix<double, 5, 1> center() const { return (lo + hi) / 2.0; }
  Eigen::Matrix<double, 5, 1> half_width() const { return (hi - lo) / 2.0; }
  void validate() const;
};

/// Box covering the a-priori bounds of one subsystem, inflated by `margin`
/// (0.2 = 20%): |shat| <= max(max|s|, F / phi_min) with F = sup |f| over
/// |xi| <= xi_sup and theta in [a, b]; x and y get [-v, v] with v = 1 + margin.
/// `s_range` is the bound on the measured signal.
DomainBox default_domain(const Subsystem& sub, double xi_sup, Interval s_range,
                         double margin = 0.2);

/// zeta' = sum_j alpha_j sigma(omega_j^T (xi, s, zeta) + beta_j).
struct SigmoidNetwork {
  Sigmoid sigmoid = Sigmoid::Logistic;
  Eigen::Matrix<double, Eigen::Dynamic, 5> omega;  // N x 5
  Eigen::VectorXd beta;                             // N
  Eigen::Matrix<double, Eigen::Dynamic, 3> alpha;   // N x 3
  DomainBox domain;
  double eps_N = 0.0;

  int units() const { return static_cast<int>(beta.size()); }
  Eigen::Vector3d evaluate(double xi, double s, const Eigen::Vector3d& zeta) const;
  Eigen::Vector3d evaluate(const Eigen::Matrix<double, 5, 1>& input) const;
  /// Rows are inputs, result rows are outputs.
  Eigen::Matrix<double, Eigen::Dynamic, 3> evaluate_batch(
      const Eigen::Matrix<double, Eigen::Dynamic, 5>& inputs) const;
  bool finite() const;
};

struct Dataset {
  Eigen::Matrix<double, Eigen::Dynamic, 5> inputs;
  Eigen::Matrix<double, Eigen::Dynamic, 3> targets;

  Eigen::Index size() const { return inputs.rows(); }
};

/// Regular grid with counts[k] points along axis k (xi, s, shat, x, y).
Dataset sample_rhs(const Subsystem& sub, const DomainBox& box, const std::array<int, 5>& counts);

/// `n` uniform points drawn from the box with the given seed.
Dataset sample_rhs_random(const Subsystem& sub, const DomainBox& box, Eigen::Index n,
                          std::uint64_t seed);

struct FitSpec {
  int units = 400;
  double ridge = 1e-8;
  std::uint64_t seed = 0;
  Sigmoid sigmoid = Sigmoid::Logistic;
  // Per-unit std of omega in box-normalised coordinates, log-uniform in
  // [weight_scale, weight_scale_max].
  double weight_scale = 0.5;
  double weight_scale_max = 0.5;
  // Each unit reads a random subset of at most this many inputs (5 = dense).
  int max_support = 5;
};

struct FitReport {
  int units = 0;
  double train_error_sup = 0.0;
  double validation_error_sup = 0.0;
  DomainBox domain;
  std::uint64_t seed = 0;
};

struct FitResult {
  SigmoidNetwork network;
  FitReport report;
};

/// Random-feature fit: omega, beta are drawn from the seed, alpha solves a
/// ridge least-squares problem per output. eps_N is the sup of the Euclidean
/// output error over `validation`.
FitResult fit_network(const Dataset& train, const Dataset& validation, const DomainBox& box,
                      const FitSpec& spec);

/// Bank of independently fitted per-class networks.
class NetworkBank final : public ClassifierBank {
 public:
  NetworkBank(std::vector<SigmoidNetwork> nets, std::vector<Interval> theta_bounds);

  int num_classes() const override { return static_cast<int>(nets_.size()); }
  Interval theta_bounds(int i) const override { return bounds_.at(static_cast<std::size_t>(i)); }
  void rhs(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z,
           Eigen::Ref<Eigen::VectorXd> dz) const override;
  bool in_domain(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z) const override;

  const SigmoidNetwork& network(int i) const { return nets_.at(static_cast<std::size_t>(i)); }

 private:
  std::vector<SigmoidNetwork> nets_;
  std::vector<Interval> bounds_;
};

Trajectory simulate_rnn(const NetworkBank& bank, const PlantRun& plant,
                        const Eigen::VectorXd& z0, const InputSignal& input,
                        const IntegrationOptions& opts);

/// Bounding box of subsystem `i` along a trajectory (xi, s, shat, x, y).
DomainBox trajectory_box(const Trajectory& traj, int i);

/// Largest 2-norm of the finite-difference Jacobian of prototype_rhs with
/// respect to (shat, x, y) over `samples` seeded points of `box`.
double measure_lipschitz(const Subsystem& sub, const DomainBox& box, int samples,
                         std::uint64_t seed);

struct DivergenceReport {
  bool pass = true;
  double max_gap = 0.0;
  double worst_time = 0.0;   // time of the smallest bound - gap margin
  double worst_margin = 0.0;
  std::vector<double> gaps;
  std::vector<double> bounds;
};

/// Compares ||q_i - zeta_i|| with (eps_N / L)(exp(L (t - t0)) - 1).
DivergenceReport divergence_check(const Trajectory& prototype, const Trajectory& rnn, int i,
                                  double eps_N, double L, double tolerance = 1e-9);

/// max |x_i^2 + y_i^2 - 1| over records with t >= t0 + transient.
double circle_band(const Trajectory& traj, int i, double transient);

}  // namespace arnn

#endif  // ARNN_RNN_HPP
