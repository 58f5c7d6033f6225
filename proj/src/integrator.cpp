#include "arnn/integrator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "arnn/classifier.hpp"

namespace arnn {

PrototypeBank::PrototypeBank(std::vector<Subsystem> subsystems)
    : subs_(std::move(subsystems)) {
  for (const auto& sub : subs_) {
    sub.config.validate(sub.cls);
    if (!sub.phi) {
      throw std::invalid_argument("PrototypeBank: subsystem without filter model");
    }
  }
}

Interval PrototypeBank::theta_bounds(int i) const {
  const auto& cfg = subsystem(i).config;
  return {cfg.a, cfg.b};
}

void PrototypeBank::rhs(double s, double xi, const Eigen::Ref<const Eigen::VectorXd>& z,
                        Eigen::Ref<Eigen::VectorXd> dz) const {
  for (int i = 0; i < num_classes(); ++i) {
    dz.segment<3>(3 * i) = prototype_rhs(z.segment<3>(3 * i), s, xi, subs_[static_cast<std::size_t>(i)]);
  }
}

Eigen::VectorXd PrototypeBank::initial_state(double shat0) const {
  Eigen::VectorXd z(state_dim());
  for (int i = 0; i < num_classes(); ++i) {
    z.segment<3>(3 * i) = init_state(subs_[static_cast<std::size_t>(i)].config, shat0);
  }
  return z;
}

Trajectory integrate_system(const PlantRun& plant, const ClassifierBank* bank,
                            const Eigen::VectorXd& z0, const InputSignal& input,
                            const IntegrationOptions& opts) {
  if (!(opts.dt > 0.0) || opts.horizon < 0.0 || opts.record_every < 1) {
    throw std::invalid_argument("integrate_system: need dt > 0, horizon >= 0, record_every >= 1");
  }
  const int n_cls = bank ? bank->num_classes() : 0;
  if (z0.size() != 3 * n_cls) {
    throw std::invalid_argument("integrate_system: initial state does not match bank size");
  }
  if (!plant.spec.s0_range.contains(plant.s0)) {
    throw std::invalid_argument("integrate_system: s0 outside Omega_s");
  }

  const auto steps = static_cast<long>(std::llround(opts.horizon / opts.dt));
  const long records = steps / opts.record_every + 1;

  Trajectory traj;
  traj.meta.dt = opts.dt;
  traj.meta.seed = opts.seed;
  traj.meta.record_every = opts.record_every;
  traj.meta.config_hash = opts.config_hash;
  traj.times.reserve(static_cast<std::size_t>(records));
  traj.states.resize(records, 1 + 3 * n_cls);
  traj.xi.resize(records);
  traj.hf.resize(records, n_cls);
  traj.htheta.resize(records, n_cls);
  for (int i = 0; i < n_cls; ++i) traj.theta_bounds.push_back(bank->theta_bounds(i));

  Eigen::VectorXd x(1 + 3 * n_cls);
  x[0] = plant.s0;
  x.tail(3 * n_cls) = z0;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  const bool seeded_noise = !plant.spec.noise && plant.spec.noise_bound > 0.0;
  double eta = 0.0;

  auto rhs = [&](double t, const Eigen::VectorXd& state, Eigen::VectorXd& d) {
    const double xi = input.xi(t);
    const double noise = plant.spec.noise ? plant.spec.noise(t) : eta;
    d[0] = -plant.spec.phi(state[0]) + plant.cls.f(xi, plant.theta) + noise;
    if (n_cls > 0) {
      bank->rhs(state[0], xi, state.tail(3 * n_cls), d.tail(3 * n_cls));
    }
  };

  long row = 0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.row(row) = x.transpose();
    traj.xi[row] = input.xi(t);
    if (n_cls > 0) {
      const Readout r = readout(x.tail(3 * n_cls), x[0], traj.theta_bounds);
      traj.hf.row(row) = r.hf.transpose();
      traj.htheta.row(row) = r.htheta.transpose();
    }
    ++row;
  };

  Rk4Workspace ws(x.size());
  record(opts.t0);
  for (long k = 0; k < steps; ++k) {
    const double t = opts.t0 + static_cast<double>(k) * opts.dt;
    if (seeded_noise) eta = plant.spec.noise_bound * uniform(rng);
    try {
      rk4_step_inplace(rhs, x, t, opts.dt, ws);
    } catch (const IntegrationDiverged&) {
      throw IntegrationDiverged("integrate_system: state diverged at t=" + std::to_string(t + opts.dt));
    }
    const double t_next = opts.t0 + static_cast<double>(k + 1) * opts.dt;
    if (bank && !bank->in_domain(x[0], input.xi(t_next), x.tail(3 * n_cls))) {
      ++traj.meta.domain_escapes;
    }
    if ((k + 1) % opts.record_every == 0) record(t_next);
  }
  if (traj.meta.domain_escapes > 0) {
    traj.meta.warnings.push_back("classifier state left the certified domain on " +
                                 std::to_string(traj.meta.domain_escapes) + " steps");
  }
  return traj;
}

void write_csv(std::ostream& os, const Trajectory& traj, const std::string& provenance) {
  os << "# " << provenance << '\n';
  os << "t,s";
  for (int i = 1; i <= traj.num_classes(); ++i) {
    os << ",shat_" << i << ",x_" << i << ",y_" << i << ",theta_hat_" << i << ",hf_" << i;
  }
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    os << traj.times[k] << ',' << traj.states(r, 0);
    for (int i = 0; i < traj.num_classes(); ++i) {
      os << ',' << traj.states(r, 1 + 3 * i) << ',' << traj.states(r, 2 + 3 * i) << ','
         << traj.states(r, 3 + 3 * i) << ',' << traj.htheta(r, i) << ',' << traj.hf(r, i);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace arnn
