#include "arnn/signals.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace arnn {

IntervalSet::IntervalSet(std::initializer_list<Interval> parts)
    : IntervalSet(std::vector<Interval>(parts)) {}

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_) {
    if (!(p.lo <= p.hi)) {
      throw std::invalid_argument("IntervalSet: interval with lo > hi");
    }
  }
}

bool IntervalSet::contains(double v) const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [v](const Interval& p) { return p.contains(v); });
}

double set_distance(double x, const IntervalSet& set) {
  if (set.empty()) {
    throw std::domain_error("set_distance: empty set");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : set.parts()) {
    best = std::min(best, p.distance(x));
  }
  return best;
}

InputSignal sine_input(double amplitude, double frequency) {
  InputSignal in;
  in.name = "sine";
  in.xi = [amplitude, frequency](double t) {
    return amplitude * std::sin(frequency * t);
  };
  in.xi_sup = std::abs(amplitude);
  in.dxi_sup = std::abs(amplitude * frequency);
  return in;
}

InputSignal constant_input(double value) {
  InputSignal in;
  in.name = "constant";
  in.xi = [value](double) { return value; };
  in.xi_sup = std::abs(value);
  in.dxi_sup = 0.0;
  return in;
}

InputSignal degenerate_xi(double t0) {
  if (t0 < 0.0) {
    throw std::domain_error("degenerate_xi: t0 must be non-negative");
  }
  InputSignal in;
  in.name = "degenerate";
  in.xi = [t0](double t) {
    const double phase = std::log(t - t0 + 1.0);
    const double s = std::sin(phase);
    return s >= 0.0 ? s * s : 0.0;
  };
  in.xi_sup = 1.0;
  // d/dt sin^2(ln(tau+1)) = sin(2 ln(tau+1)) / (tau+1), bounded by 1.
  in.dxi_sup = 1.0;
  return in;
}

namespace {

IntervalSet singleton(double theta) { return IntervalSet::point(theta); }

double max_abs(Interval r) { return std::max(std::abs(r.lo), std::abs(r.hi)); }

}  // namespace

SignalClass make_signal_class(std::string_view name, Interval theta_range,
                              Interval estimation_range, double xi_sup,
                              int id) {
  if (!(theta_range.lo < theta_range.hi)) {
    throw std::invalid_argument("make_signal_class: theta_min must be < theta_max");
  }
  SignalClass cls;
  cls.id = id;
  cls.name = std::string(name);
  cls.theta_range = theta_range;
  cls.equivalence = singleton;
  const double theta_abs = max_abs(estimation_range);

  if (name == "linear") {
    cls.f = [](double xi, double theta) { return theta * xi; };
    cls.lipschitz_theta = xi_sup;
    cls.lipschitz_xi = theta_abs;
  } else if (name == "sine") {
    cls.f = [](double xi, double theta) { return std::sin(theta * xi); };
    cls.lipschitz_theta = xi_sup;
    cls.lipschitz_xi = theta_abs;
  } else if (name == "quadratic-affine") {
    if (theta_range.lo < 0.5 || theta_range.hi > 2.0) {
      throw std::invalid_argument(
          "make_signal_class: quadratic-affine requires theta range within [0.5, 2]");
    }
    cls.f = [](double xi, double theta) { return theta * theta * xi + theta; };
    cls.lipschitz_theta = 2.0 * theta_abs * xi_sup + 1.0;
    cls.lipschitz_xi = theta_abs * theta_abs;
  } else {
    throw std::invalid_argument("make_signal_class: unknown family '" +
                                std::string(name) + "'");
  }
  return cls;
}

double eval_signal(const SignalClass& cls, const InputSignal& input,
                   double theta, double t) {
  if (t < 0.0) {
    throw std::domain_error("eval_signal: negative time");
  }
  return cls.f(input.xi(t), theta);
}

PersistencyEstimate estimate_persistency(const SignalClass& cls,
                                         const InputSignal& input, double theta,
                                         double theta_prime, double window_T,
                                         double horizon, double dt) {
  if (!(window_T > 0.0) || !(horizon >= window_T) || !(dt > 0.0)) {
    throw std::invalid_argument(
        "estimate_persistency: need window_T > 0, horizon >= window_T, dt > 0");
  }
  const auto per_window = static_cast<long>(std::llround(window_T / dt));
  const auto windows = static_cast<long>(std::floor(horizon / window_T + 1e-12));

  double worst = std::numeric_limits<double>::infinity();
  double worst_start = 0.0;
  for (long w = 0; w < windows; ++w) {
    const double start = static_cast<double>(w) * window_T;
    double window_max = 0.0;
    for (long k = 0; k <= per_window; ++k) {
      const double t = start + static_cast<double>(k) * dt;
      const double xi = input.xi(t);
      window_max = std::max(window_max, std::abs(cls.f(xi, theta) - cls.f(xi, theta_prime)));
    }
    if (window_max < worst) {
      worst = window_max;
      worst_start = start;
    }
  }

  PersistencyEstimate est;
  est.window_T = window_T;
  est.rho_samples.push_back(
      {set_distance(theta, cls.equivalence(theta_prime)), worst});
  est.satisfied = worst > 0.0;
  est.worst_window_start = worst_start;
  return est;
}

PersistencyEstimate sample_rho_envelope(const SignalClass& cls,
                                        const InputSignal& input,
                                        Interval range,
                                        const std::vector<double>& separations,
                                        int n_theta, double window_T,
                                        double horizon, double dt) {
  if (separations.empty() || n_theta < 1) {
    throw std::invalid_argument("sample_rho_envelope: empty sampling plan");
  }
  if (!std::is_sorted(separations.begin(), separations.end()) ||
      std::adjacent_find(separations.begin(), separations.end()) != separations.end()) {
    throw std::invalid_argument("sample_rho_envelope: separations must be strictly increasing");
  }
  PersistencyEstimate env;
  env.window_T = window_T;
  env.satisfied = true;
  for (double sep : separations) {
    double worst = std::numeric_limits<double>::infinity();
    const double span = range.width() - sep;
    if (span < 0.0) {
      throw std::invalid_argument("sample_rho_envelope: separation exceeds range");
    }
    for (int k = 0; k < n_theta; ++k) {
      const double frac = n_theta == 1 ? 0.0 : static_cast<double>(k) / (n_theta - 1);
      const double theta = range.lo + frac * span;
      const auto one = estimate_persistency(cls, input, theta, theta + sep,
                                            window_T, horizon, dt);
      worst = std::min(worst, one.rho_samples.front().deviation);
    }
    env.rho_samples.push_back({sep, worst});
    env.satisfied = env.satisfied && (sep == 0.0 || worst > 0.0);
  }
  return env;
}

double RhoEnvelope::inverse(double u) const {
  if (!(slope > 0.0)) {
    throw std::domain_error("RhoEnvelope: non-positive slope has no inverse");
  }
  return u / slope;
}

RhoEnvelope RhoEnvelope::from_samples(const std::vector<RhoSample>& samples) {
  RhoEnvelope env;
  env.slope = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (s.separation <= 0.0) continue;
    env.slope = std::min(env.slope, s.deviation / s.separation);
    env.certified_max = std::max(env.certified_max, s.separation);
  }
  if (!std::isfinite(env.slope)) {
    throw std::invalid_argument("RhoEnvelope: no positive separations sampled");
  }
  return env;
}

LipschitzEstimate estimate_lipschitz(const SignalClass& cls,
                                     const InputSignal& input,
                                     const LipschitzGrid& grid) {
  if (grid.n_theta < 2 || grid.n_xi < 2) {
    throw std::invalid_argument("estimate_lipschitz: grids need at least 2 points");
  }
  auto node = [](Interval r, int n, int k) {
    return r.lo + r.width() * static_cast<double>(k) / (n - 1);
  };

  LipschitzEstimate est;
  const double h_theta = grid.theta.width() / (grid.n_theta - 1);
  const double h_xi = grid.xi.width() / (grid.n_xi - 1);
  for (int j = 0; j < grid.n_xi; ++j) {
    const double xi = node(grid.xi, grid.n_xi, j);
    for (int k = 0; k < grid.n_theta; ++k) {
      const double theta = node(grid.theta, grid.n_theta, k);
      const double f0 = cls.f(xi, theta);
      if (k + 1 < grid.n_theta && h_theta > 0.0) {
        const double f1 = cls.f(xi, node(grid.theta, grid.n_theta, k + 1));
        est.d_theta = std::max(est.d_theta, std::abs(f1 - f0) / h_theta);
      }
      if (j + 1 < grid.n_xi && h_xi > 0.0) {
        const double f1 = cls.f(node(grid.xi, grid.n_xi, j + 1), theta);
        est.d_xi = std::max(est.d_xi, std::abs(f1 - f0) / h_xi);
      }
    }
  }
  est.d_f = 2.0 * est.d_xi * input.dxi_sup;

  auto report = [&est](const std::string& msg) {
    est.ok = false;
    est.violations.push_back(msg);
  };
  if (est.d_theta > cls.lipschitz_theta + grid.tolerance) {
    std::ostringstream os;
    os << "D_theta estimate " << est.d_theta << " exceeds declared " << cls.lipschitz_theta;
    report(os.str());
  }
  if (est.d_xi > cls.lipschitz_xi + grid.tolerance) {
    std::ostringstream os;
    os << "D_xi estimate " << est.d_xi << " exceeds declared " << cls.lipschitz_xi;
    report(os.str());
  }

  // Generalized bound |f(xi,th) - f(xi,th')| <= D_theta * dist(th, E(th')) on
  // a coarse pair grid.
  const int pairs = std::min(grid.n_theta, 41);
  const int xis = std::min(grid.n_xi, 41);
  for (int p = 0; p < pairs; ++p) {
    const double th_p = node(grid.theta, pairs, p);
    const IntervalSet eq = cls.equivalence(th_p);
    if (!eq.contains(th_p)) {
      report("equivalence set of theta=" + std::to_string(th_p) + " does not contain theta");
    }
    for (int q = 0; q < pairs; ++q) {
      const double th = node(grid.theta, pairs, q);
      const double bound = cls.lipschitz_theta * set_distance(th, eq);
      for (int j = 0; j < xis; ++j) {
        const double xi = node(grid.xi, xis, j);
        const double diff = std::abs(cls.f(xi, th) - cls.f(xi, th_p));
        if (diff > bound + grid.tolerance) {
          std::ostringstream os;
          os << "generalized Lipschitz bound violated at theta=" << th
             << ", theta'=" << th_p << ", xi=" << xi;
          report(os.str());
          break;
        }
      }
    }
  }
  return est;
}

}  // namespace arnn
