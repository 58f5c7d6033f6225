#include "arnn/plant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "arnn/integrator.hpp"

namespace arnn {

FilterNonlinearity make_phi(std::string_view name) {
  if (name == "identity") {
    return {[](double s) { return s; }, 1.0, 1.0};
  }
  if (name == "affine-sine") {
    return {[](double s) { return 2.0 * s + 0.1 * std::sin(s); }, 1.9, 2.1};
  }
  if (name == "cubic") {
    return {[](double s) { return s * s * s; }, 1.0, 2.0};
  }
  throw std::invalid_argument("make_phi: unknown filter '" + std::string(name) + "'");
}

PlantSpec default_plant_spec(double noise_bound) {
  const auto phi = make_phi("identity");
  PlantSpec spec;
  spec.phi = phi.phi;
  spec.phi_min = phi.slope_min;
  spec.phi_max = phi.slope_max;
  spec.noise_bound = noise_bound;
  return spec;
}

ScalarMap piecewise_constant_noise(std::vector<std::pair<double, double>> table) {
  if (table.empty()) {
    throw std::invalid_argument("piecewise_constant_noise: empty table");
  }
  std::sort(table.begin(), table.end());
  return [table = std::move(table)](double t) {
    auto it = std::upper_bound(table.begin(), table.end(), t,
                               [](double v, const auto& row) { return v < row.first; });
    if (it == table.begin()) return table.front().second;
    return std::prev(it)->second;
  };
}

ScalarMap load_noise_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_noise_csv: cannot open " + path);
  }
  std::vector<std::pair<double, double>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0;
    double eta = 0.0;
    if (row >> t >> eta) table.emplace_back(t, eta);  // header rows fail to parse
  }
  return piecewise_constant_noise(std::move(table));
}

double plant_rhs(double s, double t, const SignalClass& cls,
                 const InputSignal& input, double theta, const PlantSpec& spec,
                 double eta) {
  return -spec.phi(s) + cls.f(input.xi(t), theta) + eta;
}

double plant_rhs(double s, double t, const SignalClass& cls,
                 const InputSignal& input, double theta, const PlantSpec& spec) {
  return plant_rhs(s, t, cls, input, theta, spec, spec.noise ? spec.noise(t) : 0.0);
}

Trajectory simulate_measurement(const SignalClass& cls, const InputSignal& input,
                                double theta, const PlantSpec& spec, double s0,
                                double t0, double horizon, double dt,
                                std::uint64_t seed) {
  PlantRun run{cls, theta, spec, s0};
  IntegrationOptions opts;
  opts.t0 = t0;
  opts.horizon = horizon;
  opts.dt = dt;
  opts.seed = seed;
  opts.record_every = 1;
  return integrate_system(run, nullptr, Eigen::VectorXd(0), input, opts);
}

SlopeReport verify_slope_bounds(const PlantSpec& spec, Interval range, int points,
                                double tolerance) {
  if (points < 2 || !(range.hi > range.lo)) {
    throw std::invalid_argument("verify_slope_bounds: degenerate grid");
  }
  SlopeReport rep;
  rep.observed_min = std::numeric_limits<double>::infinity();
  rep.observed_max = -std::numeric_limits<double>::infinity();
  const double h = range.width() / (points - 1);
  double prev = spec.phi(range.lo);
  for (int k = 1; k < points; ++k) {
    const double u = range.lo + h * k;
    const double cur = spec.phi(u);
    const double slope = (cur - prev) / h;
    rep.observed_min = std::min(rep.observed_min, slope);
    rep.observed_max = std::max(rep.observed_max, slope);
    if (slope < spec.phi_min - tolerance || slope > spec.phi_max + tolerance) {
      rep.violations.push_back({u - h / 2.0, slope});
    }
    prev = cur;
  }
  rep.pass = rep.violations.empty();
  return rep;
}

bool verify_noise_bound(const PlantSpec& spec, double horizon, double dt) {
  if (!spec.noise) return true;
  const auto n = static_cast<long>(std::llround(horizon / dt));
  for (long k = 0; k <= n; ++k) {
    if (std::abs(spec.noise(static_cast<double>(k) * dt)) > spec.noise_bound) return false;
  }
  return true;
}

}  // namespace arnn
