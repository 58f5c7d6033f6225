#ifndef ARNN_TRAJECTORY_HPP
#define ARNN_TRAJECTORY_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arnn/signals.hpp"

namespace arnn {

struct TrajectoryMeta {
  double dt = 0.0;
  std::uint64_t seed = 0;
  int record_every = 1;
  std::string config_hash;
  // Number of integration steps on which the classifier state left the
  // declared validity domain (network banks only).
  std::size_t domain_escapes = 0;
  std::vector<std::string> warnings;
};

/// Recorded run of the coupled system. Row k of `states` is
/// (s, shat_1, x_1, y_1, ..., shat_N, x_N, y_N) at times[k]; the subsystem
/// state q_i = (shat_i, x_i, y_i) occupies columns 1 + 3i .. 3 + 3i.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;
  Eigen::VectorXd xi;
  Eigen::MatrixXd hf;      // s - shat_i
  Eigen::MatrixXd htheta;  // a_i + (b_i - a_i)/2 (x_i + 1)
  std::vector<Interval> theta_bounds;  // [a_i, b_i]
  TrajectoryMeta meta;

  std::size_t size() const { return times.size(); }
  int num_classes() const { return static_cast<int>(theta_bounds.size()); }
  double s(std::size_t k) const { return states(static_cast<Eigen::Index>(k), 0); }
  Eigen::Vector3d q(std::size_t k, int i) const {
    return states.row(static_cast<Eigen::Index>(k)).segment<3>(1 + 3 * i).transpose();
  }
  double spacing() const { return meta.dt * meta.record_every; }
};

/// CSV with a leading '#' provenance line, then the header
/// t,s,shat_1,x_1,y_1,theta_hat_1,hf_1,... and rows printed with 17
/// significant digits.
void write_csv(std::ostream& os, const Trajectory& traj,
               const std::string& provenance);

}  // namespace arnn

#endif  // ARNN_TRAJECTORY_HPP
