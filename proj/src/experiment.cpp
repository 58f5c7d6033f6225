#include "arnn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <random>
#include <set>

namespace arnn {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(json obj, std::string name) : obj_(std::move(obj)), name_(std::move(name)) {
    if (!obj_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }

  static Section child(const json& parent, const std::string& name) {
    return {parent.contains(name) ? parent.at(name) : json::object(), name};
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!obj_.contains(key) || obj_.at(key).is_null()) return;
    T v{};
    read(key, v);
    out = v;
  }

  void read(const std::string& key, Interval& out) {
    std::vector<double> v{out.lo, out.hi};
    read(key, v);
    if (v.size() != 2 || !(v[0] <= v[1])) {
      throw ConfigError(name_ + "." + key + ": expected [lo, hi] with lo <= hi");
    }
    out = {v[0], v[1]};
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + name_ + "." + item.key());
    }
  }

 private:
  json obj_;
  std::string name_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  static const std::set<std::string> sections{
      "seed", "classes", "input", "plant", "truth", "prototype", "persistency",
      "simulation", "sweep", "decision", "rnn", "pe", "output"};
  for (const auto& item : j.items()) {
    if (!sections.count(item.key())) throw ConfigError("unknown section '" + item.key() + "'");
  }

  ExperimentConfig cfg;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }

  if (!j.contains("classes") || !j.at("classes").is_array() || j.at("classes").empty()) {
    throw ConfigError("'classes' must be a non-empty array");
  }
  for (std::size_t k = 0; k < j.at("classes").size(); ++k) {
    Section s(j.at("classes").at(k), "classes[" + std::to_string(k) + "]");
    ClassSpec c;
    s.read("family", c.family);
    s.read("theta_range", c.theta_range);
    s.read("margin", c.margin);
    s.finish();
    require(!c.family.empty(), "classes[" + std::to_string(k) + "].family is required");
    require(c.theta_range.lo < c.theta_range.hi, "class theta_range must have lo < hi");
    require(c.margin > 0.0, "class margin must be positive");
    cfg.classes.push_back(c);
  }

  {
    auto s = Section::child(j, "input");
    s.read("kind", cfg.input.kind);
    s.read("amplitude", cfg.input.amplitude);
    s.read("frequency", cfg.input.frequency);
    s.read("value", cfg.input.value);
    s.read("t0", cfg.input.t0);
    s.finish();
    require(cfg.input.kind == "sine" || cfg.input.kind == "constant" || cfg.input.kind == "degenerate",
            "input.kind must be sine, constant or degenerate");
  }
  {
    auto s = Section::child(j, "plant");
    s.read("phi", cfg.plant.phi);
    s.read("noise_bound", cfg.plant.noise_bound);
    s.read("s0_range", cfg.plant.s0_range);
    s.read("s0", cfg.plant.s0);
    s.read("noise_csv", cfg.plant.noise_csv);
    s.finish();
    require(cfg.plant.noise_bound >= 0.0, "plant.noise_bound must be >= 0");
    require(cfg.plant.s0_range.contains(cfg.plant.s0), "plant.s0 must lie in plant.s0_range");
  }
  {
    auto s = Section::child(j, "truth");
    s.read("class", cfg.truth.cls);
    s.read("theta", cfg.truth.theta);
    s.finish();
    require(cfg.truth.cls >= 1 && cfg.truth.cls <= static_cast<int>(cfg.classes.size()),
            "truth.class must index into classes (1-based)");
  }
  {
    auto s = Section::child(j, "prototype");
    auto& p = cfg.prototype;
    s.read("kappa", p.kappa);
    s.read("d", p.d);
    s.read("safety", p.safety);
    s.read("nu_x", p.nu_x);
    s.read("delta", p.delta);
    s.read("shat0", p.shat0);
    s.read("gamma", p.gamma);
    s.finish();
    require(p.kappa > 1.0, "prototype.kappa must exceed 1");
    require(p.d > 0.0 && p.d < 1.0, "prototype.d must lie in (0, 1)");
    require(p.safety > 0.0 && p.safety < 1.0, "prototype.safety must lie in (0, 1)");
    require(p.nu_x >= 0.0 && p.nu_x <= 2.0 * std::numbers::pi, "prototype.nu_x must lie in [0, 2 pi]");
    require(p.delta >= 0.0, "prototype.delta must be >= 0");
    require(!p.gamma || *p.gamma > 0.0, "prototype.gamma must be positive");
  }
  {
    auto s = Section::child(j, "persistency");
    auto& p = cfg.persistency;
    s.read("window_T", p.window_T);
    s.read("horizon", p.horizon);
    s.read("dt", p.dt);
    s.read("separations", p.separations);
    s.read("n_theta", p.n_theta);
    s.finish();
    require(p.window_T > 0.0 && p.horizon >= p.window_T && p.dt > 0.0,
            "persistency needs window_T > 0, horizon >= window_T, dt > 0");
    require(!p.separations.empty() && p.n_theta >= 1, "persistency needs separations and n_theta >= 1");
  }
  {
    auto s = Section::child(j, "simulation");
    auto& p = cfg.simulation;
    s.read("t0", p.t0);
    s.read("horizon", p.horizon);
    s.read("dt", p.dt);
    s.read("record_every", p.record_every);
    s.finish();
    require(p.t0 >= 0.0 && p.horizon >= 0.0 && p.dt > 0.0 && p.record_every >= 1,
            "simulation needs t0 >= 0, horizon >= 0, dt > 0, record_every >= 1");
  }
  {
    auto s = Section::child(j, "sweep");
    s.read("points", cfg.sweep.points);
    s.read("entry_bound", cfg.sweep.entry_bound);
    s.read("parallel", cfg.sweep.parallel);
    s.finish();
    require(cfg.sweep.points >= 1, "sweep.points must be >= 1");
    require(!cfg.sweep.entry_bound || *cfg.sweep.entry_bound > 0.0, "sweep.entry_bound must be positive");
  }
  {
    auto s = Section::child(j, "decision");
    s.read("T_star", cfg.decision.T_star);
    s.read("eps", cfg.decision.eps);
    s.read("settle", cfg.decision.settle);
    s.finish();
    require(cfg.decision.T_star > 0.0 && cfg.decision.eps >= 0.0, "decision needs T_star > 0 and eps >= 0");
    require(!cfg.decision.settle || *cfg.decision.settle >= 0.0, "decision.settle must be >= 0");
  }
  {
    auto s = Section::child(j, "rnn");
    auto& p = cfg.rnn;
    s.read("units", p.units);
    s.read("ridge", p.ridge);
    s.read("sigmoid", p.sigmoid);
    s.read("weight_scale", p.weight_scale);
    s.read("weight_scale_max", p.weight_scale_max);
    s.read("max_support", p.max_support);
    s.read("train_samples", p.train_samples);
    s.read("validation_samples", p.validation_samples);
    s.read("margin", p.margin);
    s.read("check_horizon", p.check_horizon);
    s.read("lipschitz_samples", p.lipschitz_samples);
    s.finish();
    require(!p.units.empty() && std::all_of(p.units.begin(), p.units.end(), [](int u) { return u >= 1; }),
            "rnn.units must be a non-empty list of positive counts");
    require(p.ridge >= 0.0, "rnn.ridge must be >= 0");
    try {
      sigmoid_from_string(p.sigmoid);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("rnn.sigmoid: ") + e.what());
    }
    require(p.weight_scale > 0.0 && p.weight_scale_max >= p.weight_scale,
            "rnn needs 0 < weight_scale <= weight_scale_max");
    require(p.max_support >= 1 && p.max_support <= 5, "rnn.max_support must lie in [1, 5]");
    require(p.train_samples >= 1 && p.validation_samples >= 1, "rnn sample counts must be positive");
    require(p.margin >= 0.0 && p.check_horizon > 0.0 && p.lipschitz_samples >= 1,
            "rnn needs margin >= 0, check_horizon > 0, lipschitz_samples >= 1");
  }
  {
    auto s = Section::child(j, "pe");
    auto& p = cfg.pe;
    s.read("source", p.source);
    s.read("theta_prime", p.theta_prime);
    s.read("L", p.L);
    s.read("delta", p.delta);
    s.read("horizon", p.horizon);
    s.read("dt", p.dt);
    s.read("max_multiple", p.max_multiple);
    s.finish();
    require(p.source == "input" || p.source == "mismatch", "pe.source must be input or mismatch");
    require(p.L > 0.0 && p.horizon > p.L && p.dt > 0.0 && p.max_multiple >= 1,
            "pe needs L > 0, horizon > L, dt > 0, max_multiple >= 1");
  }
  {
    auto s = Section::child(j, "output");
    s.read("dir", cfg.out_dir);
    s.finish();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

namespace {

json interval_json(Interval r) { return json::array({r.lo, r.hi}); }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
  json classes = json::array();
  for (const auto& c : cfg.classes) {
    classes.push_back({{"family", c.family}, {"theta_range", interval_json(c.theta_range)}, {"margin", c.margin}});
  }
  const auto& p = cfg.prototype;
  return {
      {"seed", cfg.seed},
      {"classes", classes},
      {"input", {{"kind", cfg.input.kind}, {"amplitude", cfg.input.amplitude},
                 {"frequency", cfg.input.frequency}, {"value", cfg.input.value}, {"t0", cfg.input.t0}}},
      {"plant", {{"phi", cfg.plant.phi}, {"noise_bound", cfg.plant.noise_bound},
                 {"s0_range", interval_json(cfg.plant.s0_range)}, {"s0", cfg.plant.s0},
                 {"noise_csv", cfg.plant.noise_csv}}},
      {"truth", {{"class", cfg.truth.cls}, {"theta", cfg.truth.theta}}},
      {"prototype", {{"kappa", p.kappa}, {"d", p.d}, {"safety", p.safety}, {"nu_x", p.nu_x},
                     {"delta", p.delta}, {"shat0", p.shat0}, {"gamma", optional_json(p.gamma)}}},
      {"persistency", {{"window_T", cfg.persistency.window_T}, {"horizon", cfg.persistency.horizon},
                       {"dt", cfg.persistency.dt}, {"separations", cfg.persistency.separations},
                       {"n_theta", cfg.persistency.n_theta}}},
      {"simulation", {{"t0", cfg.simulation.t0}, {"horizon", cfg.simulation.horizon},
                      {"dt", cfg.simulation.dt}, {"record_every", cfg.simulation.record_every}}},
      {"sweep", {{"points", cfg.sweep.points}, {"entry_bound", optional_json(cfg.sweep.entry_bound)},
                 {"parallel", cfg.sweep.parallel}}},
      {"decision", {{"T_star", cfg.decision.T_star}, {"eps", cfg.decision.eps},
                    {"settle", optional_json(cfg.decision.settle)}}},
      {"rnn", {{"units", cfg.rnn.units}, {"ridge", cfg.rnn.ridge}, {"sigmoid", cfg.rnn.sigmoid},
               {"weight_scale", cfg.rnn.weight_scale}, {"weight_scale_max", cfg.rnn.weight_scale_max},
               {"max_support", cfg.rnn.max_support}, {"train_samples", cfg.rnn.train_samples},
               {"validation_samples", cfg.rnn.validation_samples}, {"margin", cfg.rnn.margin},
               {"check_horizon", cfg.rnn.check_horizon}, {"lipschitz_samples", cfg.rnn.lipschitz_samples}}},
      {"pe", {{"source", cfg.pe.source}, {"theta_prime", cfg.pe.theta_prime}, {"L", cfg.pe.L},
              {"delta", cfg.pe.delta}, {"horizon", cfg.pe.horizon}, {"dt", cfg.pe.dt},
              {"max_multiple", cfg.pe.max_multiple}}},
      {"output", {{"dir", cfg.out_dir}}},
  };
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  // Where artifacts go is not part of the experiment's identity.
  json canon = to_json(cfg);
  canon.erase("output");
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon.dump())));
  return buf;
}

std::uint64_t sub_seed(std::uint64_t seed, std::string_view name) {
  return splitmix64(seed ^ fnv1a(name));
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)), hash_(config_hash(cfg_)) {
  if (cfg_.classes.empty()) throw ConfigError("experiment needs at least one class");
  const auto& in = cfg_.input;
  if (in.kind == "sine") {
    input_ = sine_input(in.amplitude, in.frequency);
  } else if (in.kind == "constant") {
    input_ = constant_input(in.value);
  } else {
    input_ = degenerate_xi(in.t0);
  }
  int id = 1;
  for (const auto& c : cfg_.classes) {
    const Interval ab{c.theta_range.lo - c.margin, c.theta_range.hi + c.margin};
    try {
      classes_.push_back(make_signal_class(c.family, c.theta_range, ab, input_.xi_sup, id++));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  FilterNonlinearity phi;
  try {
    phi = make_phi(cfg_.plant.phi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  plant_.phi = phi.phi;
  plant_.phi_min = phi.slope_min;
  plant_.phi_max = phi.slope_max;
  plant_.s0_range = cfg_.plant.s0_range;
  plant_.noise_bound = cfg_.plant.noise_bound;
  if (!cfg_.plant.noise_csv.empty()) plant_.noise = load_noise_csv(cfg_.plant.noise_csv);
}

const SignalClass& Experiment::truth_class() const {
  return classes_.at(static_cast<std::size_t>(cfg_.truth.cls - 1));
}

PersistencyEstimate Experiment::persistency(const SignalClass& cls) const {
  const auto& p = cfg_.persistency;
  const auto& spec = cfg_.classes.at(static_cast<std::size_t>(cls.id - 1));
  const Interval ab{spec.theta_range.lo - spec.margin, spec.theta_range.hi + spec.margin};
  std::vector<double> seps;
  for (double s : p.separations) {
    if (s <= ab.width()) seps.push_back(s);
  }
  return sample_rho_envelope(cls, input_, ab, seps, p.n_theta, p.window_T, p.horizon, p.dt);
}

const std::vector<TuningReport>& Experiment::tuning() {
  if (tuning_) return *tuning_;
  std::vector<TuningReport> out;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& cls = classes_[i];
    const auto& spec = cfg_.classes[i];
    TuningInputs in;
    in.d_theta = cls.lipschitz_theta;
    in.d_f = 2.0 * cls.lipschitz_xi * input_.dxi_sup;
    in.phi_min = plant_.phi_min;
    in.noise_bound = plant_.noise_bound;
    in.s0_range = plant_.s0_range;
    in.a = spec.theta_range.lo - spec.margin;
    in.b = spec.theta_range.hi + spec.margin;
    in.window_T = cfg_.persistency.window_T;
    in.rho = RhoEnvelope::from_samples(persistency(cls).rho_samples);
    in.kappa = cfg_.prototype.kappa;
    in.d = cfg_.prototype.d;
    in.safety = cfg_.prototype.safety;
    in.nu_x = cfg_.prototype.nu_x;
    in.delta = cfg_.prototype.delta;
    TuningReport rep = tune_prototype(in);
    if (cfg_.prototype.gamma) {
      // h* and k' follow the operating gamma; an inadmissible override throws.
      rep.gamma = *cfg_.prototype.gamma;
      rep.warnings.push_back("prototype.gamma overrides the tuned value");
      if (rep.c > 0.0) {
        rep.h_star = tune_hstar(in.s0_range.lo, in.s0_range.hi, in.d_theta, in.a, in.b,
                                in.phi_min, rep.gamma, in.kappa, in.d, rep.c);
        rep.k_prime = choose_winding(rep.h_star, in.nu_x);
      }
    }
    out.push_back(std::move(rep));
  }
  tuning_ = std::move(out);
  return *tuning_;
}

const PrototypeBank& Experiment::bank() {
  if (bank_) return *bank_;
  const auto& tun = tuning();
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    subs.push_back({classes_[i], tun[i].config(), plant_.phi, plant_.phi_min});
  }
  bank_.emplace(std::move(subs));
  return *bank_;
}

PlantRun Experiment::plant_run(double theta) const {
  return {truth_class(), theta, plant_, cfg_.plant.s0};
}

IntegrationOptions Experiment::options(std::string_view stream) const {
  IntegrationOptions o;
  o.t0 = cfg_.simulation.t0;
  o.horizon = cfg_.simulation.horizon;
  o.dt = cfg_.simulation.dt;
  o.record_every = cfg_.simulation.record_every;
  o.seed = sub_seed(cfg_.seed, stream);
  o.config_hash = hash_;
  return o;
}

Trajectory Experiment::simulate(double theta) {
  const auto& b = bank();
  return integrate_system(plant_run(theta), &b, b.initial_state(cfg_.prototype.shat0), input_,
                          options("plant-noise"));
}

double Experiment::entry_bound() {
  if (cfg_.sweep.entry_bound) return *cfg_.sweep.entry_bound;
  return tuning().at(static_cast<std::size_t>(cfg_.truth.cls - 1)).error_bound;
}

ConvergenceReport Experiment::convergence(const Trajectory& traj, double theta) {
  const int i = cfg_.truth.cls - 1;
  const auto cfg = bank().subsystem(i).config;
  return convergence_report(traj, truth_class(), theta, entry_bound(), i, &cfg);
}

std::vector<double> Experiment::sweep_grid() const {
  const Interval r = truth_class().theta_range;
  const int n = cfg_.sweep.points;
  std::vector<double> grid;
  for (int k = 0; k < n; ++k) {
    grid.push_back(n == 1 ? r.lo : r.lo + r.width() * k / (n - 1));
  }
  return grid;
}

SweepResult Experiment::sweep() {
  bank();
  entry_bound();
  return sweep_uniformity(
      sweep_grid(), [this](double theta) { return convergence(simulate(theta), theta); },
      cfg_.sweep.parallel);
}

double Experiment::settle(const SweepResult& sweep) const {
  if (cfg_.decision.settle) return *cfg_.decision.settle;
  const double latest = cfg_.simulation.horizon - cfg_.decision.T_star;
  return std::clamp(1.2 * sweep.t_prime_max, 0.0, std::max(latest, 0.0));
}

NoiseBands Experiment::bands() {
  return band_from_noise(plant_.noise_bound, plant_.phi_min,
                         tuning().at(static_cast<std::size_t>(cfg_.truth.cls - 1)));
}

DecisionReport Experiment::decide(const Trajectory& traj, double settle) {
  const NoiseBands nb = bands();
  DecisionReport rep = arnn::decide(traj, cfg_.decision.T_star, cfg_.decision.eps, nb.hf, settle);
  rep.band_theta = nb.theta;
  return rep;
}

PEReport Experiment::filtered_pe() const {
  const auto& p = cfg_.pe;
  const auto n = static_cast<Eigen::Index>(std::llround(p.horizon / p.dt));
  const SignalClass& cls = truth_class();
  const double theta = cfg_.truth.theta;
  auto u_of = [&](double t) {
    const double xi = input_.xi(t);
    return p.source == "input" ? xi : cls.f(xi, theta) - cls.f(xi, p.theta_prime);
  };

  SampledSignal z{0.0, p.dt, Eigen::VectorXd(n + 1)};
  SampledSignal u{0.0, p.dt, Eigen::VectorXd(n + 1)};
  std::mt19937_64 rng(sub_seed(cfg_.seed, "pe-noise"));
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  double zk = 0.0;
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    z.values[k] = zk;
    u.values[k] = u_of(t);
    if (k == n) break;
    const double eta = plant_.noise_bound * uniform(rng);
    zk = rk4_step([&](double tt, double zz) { return -plant_.phi(zz) + u_of(tt) + eta; }, zk, t, p.dt);
  }

  FilteredPESpec spec;
  spec.phi_min = plant_.phi_min;
  spec.phi_max = plant_.phi_max;
  spec.noise_bound = plant_.noise_bound;
  spec.u_inf = u.values.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 1; k <= n; ++k) {
    spec.du_inf = std::max(spec.du_inf, std::abs(u.values[k] - u.values[k - 1]) / p.dt);
  }
  return verify_filtered_pe(z, u, spec, p.L, p.delta, p.max_multiple);
}

DomainBox Experiment::rnn_domain(int i) {
  // The measured signal obeys |s| <= max(|s0|, (sup |f| + Delta) / phi_min)
  // with f the class that drives this experiment's plant.
  const auto& b = bank();
  const auto& sub = b.subsystem(cfg_.truth.cls - 1);
  const DomainBox own = default_domain(sub, input_.xi_sup, plant_.s0_range, 0.0);
  const double s_abs = std::max(std::abs(plant_.s0_range.lo), std::abs(plant_.s0_range.hi));
  const double s_sup = std::max(s_abs, (own.hi[2] * sub.phi_min + plant_.noise_bound) / plant_.phi_min);
  return default_domain(b.subsystem(i), input_.xi_sup, {-s_sup, s_sup}, cfg_.rnn.margin);
}

RnnFit Experiment::fit_rnn(int units) {
  const auto& b = bank();
  const auto& r = cfg_.rnn;
  FitSpec spec;
  spec.units = units;
  spec.ridge = r.ridge;
  spec.sigmoid = sigmoid_from_string(r.sigmoid);
  spec.weight_scale = r.weight_scale;
  spec.weight_scale_max = r.weight_scale_max;
  spec.max_support = r.max_support;

  std::vector<DomainBox> boxes;
  for (int i = 0; i < b.num_classes(); ++i) boxes.push_back(rnn_domain(i));

  std::vector<std::future<FitResult>> jobs;
  for (int i = 0; i < b.num_classes(); ++i) {
    const std::string tag = std::to_string(i + 1);
    FitSpec s = spec;
    s.seed = sub_seed(cfg_.seed, "rnn-weights-" + tag);
    jobs.push_back(std::async(std::launch::async, [&, i, s, tag] {
      const auto& sub = b.subsystem(i);
      const auto& box = boxes[static_cast<std::size_t>(i)];
      const Dataset train = sample_rhs_random(sub, box, r.train_samples, sub_seed(cfg_.seed, "rnn-train-" + tag));
      const Dataset val = sample_rhs_random(sub, box, r.validation_samples, sub_seed(cfg_.seed, "rnn-validation-" + tag));
      return fit_network(train, val, box, s);
    }));
  }
  std::vector<FitResult> fits;
  std::vector<SigmoidNetwork> nets;
  std::vector<Interval> bounds;
  for (int i = 0; i < b.num_classes(); ++i) {
    fits.push_back(jobs[static_cast<std::size_t>(i)].get());
    nets.push_back(fits.back().network);
    bounds.push_back(b.theta_bounds(i));
  }
  return {std::move(fits), NetworkBank(std::move(nets), std::move(bounds))};
}

Trajectory Experiment::simulate_rnn(const NetworkBank& nb, double theta, double horizon) {
  IntegrationOptions o = options("plant-noise");
  o.horizon = horizon;
  return arnn::simulate_rnn(nb, plant_run(theta), bank().initial_state(cfg_.prototype.shat0), input_, o);
}

DivergenceSummary Experiment::divergence(const RnnFit& fit, double theta) {
  const auto& b = bank();
  IntegrationOptions o = options("plant-noise");
  o.horizon = cfg_.rnn.check_horizon;
  o.record_every = 1;
  const Eigen::VectorXd z0 = b.initial_state(cfg_.prototype.shat0);
  const Trajectory proto = integrate_system(plant_run(theta), &b, z0, input_, o);
  const Trajectory net = arnn::simulate_rnn(fit.bank, plant_run(theta), z0, input_, o);

  DivergenceSummary out;
  for (int i = 0; i < b.num_classes(); ++i) {
    DomainBox box = trajectory_box(proto, i);
    const DomainBox other = trajectory_box(net, i);
    box.lo = box.lo.cwiseMin(other.lo);
    box.hi = box.hi.cwiseMax(other.hi);
    const double L = measure_lipschitz(b.subsystem(i), box, cfg_.rnn.lipschitz_samples,
                                       sub_seed(cfg_.seed, "lipschitz-" + std::to_string(i + 1)));
    out.lipschitz.push_back(L);
    out.reports.push_back(divergence_check(proto, net, i, fit.bank.network(i).eps_N, L));
    out.pass = out.pass && out.reports.back().pass;
  }
  return out;
}

}  // namespace arnn
