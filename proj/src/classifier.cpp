#include "arnn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace arnn {

Readout readout(const Eigen::Ref<const Eigen::VectorXd>& z, double s,
                const std::vector<Interval>& theta_bounds) {
  const auto n = static_cast<Eigen::Index>(theta_bounds.size());
  if (z.size() != 3 * n) {
    throw std::invalid_argument("readout: state size does not match class count");
  }
  Readout out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Interval ab = theta_bounds[static_cast<std::size_t>(i)];
    out.hf[i] = s - z[3 * i];
    out.htheta[i] = theta_hat(z[3 * i + 1], ab.lo, ab.hi);
  }
  return out;
}

std::string to_string(DecisionStatus status) {
  switch (status) {
    case DecisionStatus::Decided: return "decided";
    case DecisionStatus::Undecided: return "undecided";
    case DecisionStatus::Ambiguous: return "ambiguous";
  }
  return "unknown";
}

namespace {

// out[k] = max(values[k .. k + w]) for every k with k + w < n.
std::vector<double> sliding_max(const Eigen::Ref<const Eigen::VectorXd>& values,
                                Eigen::Index w) {
  const Eigen::Index n = values.size();
  std::vector<double> out;
  if (n <= w) return out;
  out.resize(static_cast<std::size_t>(n - w));
  std::deque<Eigen::Index> dq;
  for (Eigen::Index j = 0; j < n; ++j) {
    while (!dq.empty() && values[dq.back()] <= values[j]) dq.pop_back();
    dq.push_back(j);
    if (dq.front() < j - w) dq.pop_front();
    if (j >= w) out[static_cast<std::size_t>(j - w)] = values[dq.front()];
  }
  return out;
}

}  // namespace

DecisionReport decide(const Trajectory& traj, double T_star, double eps,
                      double noise_band, double settle) {
  if (!(T_star > 0.0) || settle < 0.0) {
    throw std::invalid_argument("decide: need T_star > 0 and settle >= 0");
  }
  if (traj.size() == 0) {
    throw std::invalid_argument("decide: empty trajectory");
  }
  const double t0 = traj.times.front();
  const double horizon = traj.times.back() - t0;
  if (horizon + 1e-9 < settle + T_star) {
    throw std::invalid_argument("decide: horizon shorter than settle + T_star");
  }

  DecisionReport rep;
  rep.T_star = T_star;
  rep.band_hf = eps + noise_band;
  const int n_cls = traj.num_classes();
  const auto w = static_cast<Eigen::Index>(std::llround(T_star / traj.spacing()));

  std::vector<std::vector<double>> window_max(static_cast<std::size_t>(n_cls));
  for (int i = 0; i < n_cls; ++i) {
    window_max[static_cast<std::size_t>(i)] = sliding_max(traj.hf.col(i).cwiseAbs(), w);
  }
  const std::size_t candidates = window_max.empty() ? 0 : window_max.front().size();

  std::optional<std::size_t> start;
  for (std::size_t k = 0; k < candidates && traj.times[k] < t0 + settle; ++k) {
    for (int i = 0; i < n_cls; ++i) {
      if (window_max[static_cast<std::size_t>(i)][k] < rep.band_hf) {
        rep.qualifying.push_back(i + 1);
      }
    }
    if (!rep.qualifying.empty()) {
      start = k;
      break;
    }
  }

  rep.per_class.resize(static_cast<std::size_t>(n_cls));
  for (int i = 0; i < n_cls; ++i) {
    auto& summary = rep.per_class[static_cast<std::size_t>(i)];
    const auto& wm = window_max[static_cast<std::size_t>(i)];
    const auto theta = traj.htheta.col(i);
    summary.theta_min = theta.minCoeff();
    summary.theta_max = theta.maxCoeff();
    summary.theta_final = theta[theta.size() - 1];
    if (start) {
      summary.window_max_hf = wm[*start];
      summary.theta_mean = theta.segment(static_cast<Eigen::Index>(*start), w + 1).mean();
    } else if (!wm.empty()) {
      const auto best = std::min_element(wm.begin(), wm.end());
      summary.window_max_hf = *best;
      summary.theta_mean =
          theta.segment(static_cast<Eigen::Index>(best - wm.begin()), w + 1).mean();
    }
  }

  if (!start) {
    rep.status = DecisionStatus::Undecided;
    return rep;
  }
  rep.t_prime = traj.times[*start];
  if (rep.qualifying.size() > 1) {
    rep.status = DecisionStatus::Ambiguous;
    return rep;
  }
  rep.status = DecisionStatus::Decided;
  rep.decided = rep.qualifying.front();
  rep.theta_estimate = rep.per_class[static_cast<std::size_t>(*rep.decided - 1)].theta_mean;
  return rep;
}

NoiseBands band_from_noise(double delta_eta, double phi_min,
                           const TuningReport& tuning) {
  if (delta_eta < 0.0 || !(phi_min > 0.0)) {
    throw std::invalid_argument("band_from_noise: need delta_eta >= 0 and phi_min > 0");
  }
  NoiseBands bands;
  bands.hf = delta_eta / phi_min;
  if (delta_eta > 0.0) {
    bands.theta = error_bound(delta_eta, tuning.d_theta, tuning.a, tuning.b,
                              tuning.d_f, tuning.L, tuning.rho)
                      .value;
  }
  return bands;
}

}  // namespace arnn
