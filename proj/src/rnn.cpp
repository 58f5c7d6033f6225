#include "arnn/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace arnn {

using Vec5 = Eigen::Matrix<double, 5, 1>;

std::string to_string(Sigmoid s) {
  return s == Sigmoid::Tanh ? "tanh" : "logistic";
}

Sigmoid sigmoid_from_string(std::string_view name) {
  if (name == "logistic") return Sigmoid::Logistic;
  if (name == "tanh") return Sigmoid::Tanh;
  throw std::invalid_argument("unknown sigmoid '" + std::string(name) + "'");
}

bool DomainBox::contains(const Vec5& p) const {
  return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

void DomainBox::validate() const {
  if (!lo.allFinite() || !hi.allFinite() || !(hi.array() > lo.array()).all()) {
    throw std::invalid_argument("DomainBox: degenerate box");
  }
}

DomainBox default_domain(const Subsystem& sub, double xi_sup, Interval s_range, double margin) {
  if (xi_sup < 0.0 || margin < 0.0) {
    throw std::invalid_argument("default_domain: need xi_sup >= 0 and margin >= 0");
  }
  const auto& cfg = sub.config;
  double f_sup = 0.0;
  constexpr int grid = 201;
  for (int u = 0; u < grid; ++u) {
    const double xi = xi_sup * (2.0 * u / (grid - 1) - 1.0);
    for (int v = 0; v < grid; ++v) {
      const double th = cfg.a + (cfg.b - cfg.a) * v / (grid - 1);
      f_sup = std::max(f_sup, std::abs(sub.cls.f(xi, th)));
    }
  }
  const double s_abs = std::max(std::abs(s_range.lo), std::abs(s_range.hi));
  const double shat = std::max(s_abs, f_sup / sub.phi_min);
  const double grow = 1.0 + margin;
  const double xi_half = std::max(xi_sup, 1e-3);

  DomainBox box;
  box.lo << -xi_half * grow, s_range.lo - margin * s_range.width() / 2.0, -shat * grow, -grow, -grow;
  box.hi << xi_half * grow, s_range.hi + margin * s_range.width() / 2.0, shat * grow, grow, grow;
  box.validate();
  return box;
}

namespace {

template <typename Derived>
void apply_sigmoid(Sigmoid kind, Eigen::ArrayBase<Derived>& z) {
  if (kind == Sigmoid::Tanh) {
    z = z.tanh();
  } else {
    z = 1.0 / (1.0 + (-z).exp());
  }
}

Eigen::MatrixXd features(const SigmoidNetwork& net,
                         const Eigen::Ref<const Eigen::Matrix<double, Eigen::Dynamic, 5>>& inputs) {
  Eigen::MatrixXd h = inputs * net.omega.transpose();
  h.rowwise() += net.beta.transpose();
  auto arr = h.array();
  apply_sigmoid(net.sigmoid, arr);
  return h;
}

}  // namespace

Eigen::Vector3d SigmoidNetwork::evaluate(const Vec5& input) const {
  Eigen::ArrayXd h = (omega * input + beta).array();
  apply_sigmoid(sigmoid, h);
  return alpha.transpose() * h.matrix();
}

Eigen::Vector3d SigmoidNetwork::evaluate(double xi, double s, const Eigen::Vector3d& zeta) const {
  Vec5 in;
  in << xi, s, zeta;
  return evaluate(in);
}

Eigen::Matrix<double, Eigen::Dynamic, 3> SigmoidNetwork::evaluate_batch(
    const Eigen::Matrix<double, Eigen::Dynamic, 5>& inputs) const {
  return features(*this, inputs) * alpha;
}

bool SigmoidNetwork::finite() const {
  return omega.allFinite() && beta.allFinite() && alpha.allFinite() && std::isfinite(eps_N);
}

namespace {

Dataset evaluate_targets(const Subsystem& sub, Eigen::Matrix<double, Eigen::Dynamic, 5> inputs) {
  Dataset ds;
  ds.targets.resize(inputs.rows(), 3);
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    const Eigen::Vector3d q = inputs.row(r).tail<3>().transpose();
    ds.targets.row(r) = prototype_rhs(q, inputs(r, 1), inputs(r, 0), sub).transpose();
  }
  ds.inputs = std::move(inputs);
  return ds;
}

}  // namespace

Dataset sample_rhs(const Subsystem& sub, const DomainBox& box, const std::array<int, 5>& counts) {
  box.validate();
  Eigen::Index total = 1;
  for (int c : counts) {
    if (c < 1) throw std::invalid_argument("sample_rhs: grid counts must be >= 1");
    total *= c;
  }
  Eigen::Matrix<double, Eigen::Dynamic, 5> inputs(total, 5);
  std::array<int, 5> idx{};
  for (Eigen::Index r = 0; r < total; ++r) {
    for (int k = 0; k < 5; ++k) {
      const double frac = counts[static_cast<std::size_t>(k)] == 1
                              ? 0.5
                              : static_cast<double>(idx[static_cast<std::size_t>(k)]) /
                                    (counts[static_cast<std::size_t>(k)] - 1);
      inputs(r, k) = box.lo[k] + frac * (box.hi[k] - box.lo[k]);
    }
    for (int k = 4; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < counts[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return evaluate_targets(sub, std::move(inputs));
}

Dataset sample_rhs_random(const Subsystem& sub, const DomainBox& box, Eigen::Index n,
                          std::uint64_t seed) {
  box.validate();
  if (n < 1) throw std::invalid_argument("sample_rhs_random: need n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::Matrix<double, Eigen::Dynamic, 5> inputs(n, 5);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int k = 0; k < 5; ++k) inputs(r, k) = box.lo[k] + unit(rng) * (box.hi[k] - box.lo[k]);
  }
  return evaluate_targets(sub, std::move(inputs));
}

namespace {

double sup_error(const SigmoidNetwork& net, const Dataset& ds) {
  if (ds.size() == 0) return 0.0;
  constexpr Eigen::Index batch = 4096;
  double worst = 0.0;
  for (Eigen::Index r0 = 0; r0 < ds.size(); r0 += batch) {
    const Eigen::Index m = std::min(batch, ds.size() - r0);
    const auto pred = net.evaluate_batch(ds.inputs.middleRows(r0, m));
    worst = std::max(worst, (pred - ds.targets.middleRows(r0, m)).rowwise().norm().maxCoeff());
  }
  return worst;
}

}  // namespace

FitResult fit_network(const Dataset& train, const Dataset& validation, const DomainBox& box,
                      const FitSpec& spec) {
  if (spec.units < 1) throw std::invalid_argument("fit_network: need at least one unit");
  if (train.size() == 0) throw std::invalid_argument("fit_network: empty dataset");
  if (spec.ridge < 0.0) throw std::invalid_argument("fit_network: ridge must be >= 0");
  if (spec.max_support < 1 || spec.max_support > 5) {
    throw std::invalid_argument("fit_network: max_support must lie in [1, 5]");
  }
  if (!(spec.weight_scale > 0.0) || spec.weight_scale_max < spec.weight_scale) {
    throw std::invalid_argument("fit_network: need 0 < weight_scale <= weight_scale_max");
  }
  box.validate();

  const int n = spec.units;
  SigmoidNetwork net;
  net.sigmoid = spec.sigmoid;
  net.domain = box;
  net.omega.resize(n, 5);
  net.beta.resize(n);

  // Weights are drawn in box-normalised coordinates u = (p - c) / h, with each
  // unit's transition placed at a uniform point of the box.
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double log_lo = std::log(spec.weight_scale);
  const double log_span = std::log(spec.weight_scale_max) - log_lo;
  const Vec5 c = box.center();
  const Vec5 h = box.half_width();
  for (int j = 0; j < n; ++j) {
    Vec5 w;
    Vec5 centre;
    const double scale = std::exp(log_lo + log_span * (unit(rng) + 1.0) / 2.0);
    for (int k = 0; k < 5; ++k) w[k] = scale * normal(rng);
    if (spec.max_support < 5) {
      std::array<int, 5> order{0, 1, 2, 3, 4};
      std::shuffle(order.begin(), order.end(), rng);
      const int keep = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(spec.max_support));
      for (int k = keep; k < 5; ++k) w[order[static_cast<std::size_t>(k)]] = 0.0;
    }
    for (int k = 0; k < 5; ++k) centre[k] = unit(rng);
    const Vec5 w_orig = w.cwiseQuotient(h);
    net.omega.row(j) = w_orig.transpose();
    net.beta[j] = -w.dot(centre) - w_orig.dot(c);
  }

  // Outputs are scaled to unit RMS so the ridge acts evenly on them.
  Eigen::Vector3d scale;
  for (int k = 0; k < 3; ++k) {
    const double rms = std::sqrt(train.targets.col(k).squaredNorm() / static_cast<double>(train.size()));
    scale[k] = rms > 0.0 ? rms : 1.0;
  }

  // Ridge least squares solved as the augmented problem [Phi; sqrt(m lambda) I]
  // by Householder QR, which avoids squaring the condition number.
  const Eigen::Index m = train.size();
  Eigen::MatrixXd design(m + n, n);
  design.topRows(m) = features(net, train.inputs);
  design.bottomRows(n) = std::sqrt(static_cast<double>(m) * spec.ridge) * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m + n, 3);
  rhs.topRows(m) = train.targets * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-13);
  if (qr.rank() < n) {
    throw std::runtime_error("fit_network: least-squares system is singular; increase ridge");
  }
  net.alpha = qr.solve(rhs) * scale.asDiagonal();
  if (!net.alpha.allFinite()) {
    throw std::runtime_error("fit_network: non-finite coefficients; increase ridge");
  }

  FitResult out;
  out.report.units = n;
  out.report.seed = spec.seed;
  out.report.domain = box;
  out.report.train_error_sup = sup_error(net, train);
  out.report.validation_error_sup = validation.size() > 0 ? sup_error(net, validation)
                                                          : out.report.train_error_sup;
  net.eps_N = out.report.validation_error_sup;
  out.network = std::move(net);
  return out;
}

NetworkBank::NetworkBank(std::vector<SigmoidNetwork> nets, std::vector<Interval> theta_bounds)
    : nets_(std::move(nets)), bounds_(std::move(theta_bounds)) {
  if (nets_.size() != bounds_.size()) {
    throw std::invalid_argument("NetworkBank: one theta range per network required");
  }
  for (const auto& net : nets_) {
    if (!net.finite() || net.omega.rows() != net.beta.size() || net.alpha.rows() != net.beta.size()) {
      throw std::invalid_argument("NetworkBank: malformed network");
    }
  }
}

void NetworkBank::rhs(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z,
                      Eigen::Ref<Eigen::VectorXd> dz) const {
  for (int i = 0; i < num_classes(); ++i) {
    dz.segment<3>(3 * i) = nets_[static_cast<std::size_t>(i)].evaluate(xi, s, z.segment<3>(3 * i));
  }
}

bool NetworkBank::in_domain(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z) const {
  for (int i = 0; i < num_classes(); ++i) {
    Vec5 p;
    p << xi, s, z.segment<3>(3 * i);
    if (!nets_[static_cast<std::size_t>(i)].domain.contains(p)) return false;
  }
  return true;
}

Trajectory simulate_rnn(const NetworkBank& bank, const PlantRun& plant,
                        const Eigen::VectorXd& z0, const InputSignal& input,
                        const IntegrationOptions& opts) {
  return integrate_system(plant, &bank, z0, input, opts);
}

DomainBox trajectory_box(const Trajectory& traj, int i) {
  if (i < 0 || i >= traj.num_classes() || traj.size() == 0) {
    throw std::invalid_argument("trajectory_box: no such subsystem");
  }
  DomainBox box;
  box.lo(0) = traj.xi.minCoeff();
  box.hi(0) = traj.xi.maxCoeff();
  box.lo(1) = traj.states.col(0).minCoeff();
  box.hi(1) = traj.states.col(0).maxCoeff();
  for (int k = 0; k < 3; ++k) {
    box.lo(2 + k) = traj.states.col(1 + 3 * i + k).minCoeff();
    box.hi(2 + k) = traj.states.col(1 + 3 * i + k).maxCoeff();
  }
  return box;
}

double measure_lipschitz(const Subsystem& sub, const DomainBox& box, int samples,
                         std::uint64_t seed) {
  if (samples < 1 || !(box.hi.array() >= box.lo.array()).all()) {
    throw std::invalid_argument("measure_lipschitz: need samples >= 1 and a valid box");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    Vec5 p;
    for (int k = 0; k < 5; ++k) p[k] = box.lo[k] + unit(rng) * (box.hi[k] - box.lo[k]);
    const Eigen::Vector3d q = p.tail<3>();
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d qp = q;
      Eigen::Vector3d qm = q;
      qp[k] += h;
      qm[k] -= h;
      jac.col(k) = (prototype_rhs(qp, p[1], p[0], sub) - prototype_rhs(qm, p[1], p[0], sub)) / (2.0 * h);
    }
    worst = std::max(worst, Eigen::JacobiSVD<Eigen::Matrix3d>(jac).singularValues()[0]);
  }
  return worst;
}

DivergenceReport divergence_check(const Trajectory& prototype, const Trajectory& rnn, int i,
                                  double eps_N, double L, double tolerance) {
  if (prototype.size() != rnn.size() || prototype.spacing() != rnn.spacing() ||
      prototype.size() == 0 || prototype.times.front() != rnn.times.front()) {
    throw std::invalid_argument("divergence_check: trajectories are on different grids");
  }
  if (i < 0 || i >= prototype.num_classes() || i >= rnn.num_classes()) {
    throw std::invalid_argument("divergence_check: no such subsystem");
  }
  if (eps_N < 0.0 || !(L > 0.0)) {
    throw std::invalid_argument("divergence_check: need eps_N >= 0 and L > 0");
  }
  DivergenceReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double t0 = prototype.times.front();
  for (std::size_t k = 0; k < prototype.size(); ++k) {
    const double gap = (prototype.q(k, i) - rnn.q(k, i)).norm();
    const double bound = eps_N / L * std::expm1(L * (prototype.times[k] - t0));
    rep.gaps.push_back(gap);
    rep.bounds.push_back(bound);
    rep.max_gap = std::max(rep.max_gap, gap);
    if (bound - gap < rep.worst_margin) {
      rep.worst_margin = bound - gap;
      rep.worst_time = prototype.times[k];
    }
    if (gap > bound + tolerance) rep.pass = false;
  }
  return rep;
}

double circle_band(const Trajectory& traj, int i, double transient) {
  if (i < 0 || i >= traj.num_classes()) throw std::invalid_argument("circle_band: no such subsystem");
  double band = 0.0;
  if (traj.size() == 0) return band;
  const double t_start = traj.times.front() + transient;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] < t_start) continue;
    const Eigen::Vector3d q = traj.q(k, i);
    band = std::max(band, std::abs(q[1] * q[1] + q[2] * q[2] - 1.0));
  }
  return band;
}

}  // namespace arnn
