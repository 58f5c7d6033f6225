#ifndef ARNN_EXPERIMENT_HPP
#define ARNN_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "arnn/analysis.hpp"
#include "arnn/classifier.hpp"
#include "arnn/integrator.hpp"
#include "arnn/plant.hpp"
#include "arnn/prototype.hpp"
#include "arnn/rnn.hpp"
#include "arnn/signals.hpp"

namespace arnn {

inline constexpr std::string_view kVersion = "0.1.0";

/// Malformed or out-of-range experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ClassSpec {
  std::string family;
  Interval theta_range;
  double margin = 0.25;  // [a, b] = theta_range widened by margin on both sides
};

struct InputSpec {
  std::string kind = "sine";  // sine | constant | degenerate
  double amplitude = 1.0;
  double frequency = 1.0;
  double value = 0.0;
  double t0 = 0.0;
};

struct PlantConfig {
  std::string phi = "identity";
  double noise_bound = 0.0;
  Interval s0_range{-1.0, 1.0};
  double s0 = 0.0;
  std::string noise_csv;  // empty: seeded uniform noise
};

struct TruthSpec {
  int cls = 1;  // 1-based
  double theta = 1.0;
};

struct PrototypeSpec {
  double kappa = 2.0;
  double d = 0.5;
  double safety = 0.5;
  double nu_x = 0.0;
  double delta = 1e-3;
  double shat0 = 0.0;
  std::optional<double> gamma;  // overrides the tuned value
};

struct PersistencySpec {
  double window_T = 6.283185307179586;
  double horizon = 4.0 * 6.283185307179586;
  double dt = 0.01;
  std::vector<double> separations{0.1, 0.25, 0.5, 1.0, 2.0};
  int n_theta = 9;
};

struct SimulationSpec {
  double t0 = 0.0;
  double horizon = 2000.0;
  double dt = 0.01;
  int record_every = 10;
};

struct SweepSpec {
  int points = 11;
  std::optional<double> entry_bound;  // default: the accuracy bound
  bool parallel = false;
};

struct DecisionSpec {
  double T_star = 20.0;
  double eps = 0.02;
  std::optional<double> settle;  // default: 1.2 * T'_max from the sweep
};

struct RnnSpec {
  std::vector<int> units{400};
  double ridge = 1e-12;
  std::string sigmoid = "logistic";
  double weight_scale = 0.5;
  double weight_scale_max = 0.5;
  int max_support = 5;
  int train_samples = 30000;
  int validation_samples = 20000;
  double margin = 0.2;
  double check_horizon = 2.0;
  int lipschitz_samples = 2000;
};

struct PESpec {
  std::string source = "input";  // input: u = xi; mismatch: u = f(xi, theta) - f(xi, theta_prime)
  double theta_prime = 0.0;
  double L = 6.283185307179586;
  double delta = 4.0;
  double horizon = 60.0;
  double dt = 0.01;
  int max_multiple = 8;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::vector<ClassSpec> classes;
  InputSpec input;
  PlantConfig plant;
  TruthSpec truth;
  PrototypeSpec prototype;
  PersistencySpec persistency;
  SimulationSpec simulation;
  SweepSpec sweep;
  DecisionSpec decision;
  RnnSpec rnn;
  PESpec pe;
  std::string out_dir = "out";
};

/// Parses and validates; missing keys take the defaults above.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Canonical form with every default filled in.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a (64-bit, hex) of the canonical dump, output section excluded.
std::string config_hash(const ExperimentConfig& cfg);

/// Deterministic seed derived from the top-level seed and a stream name.
std::uint64_t sub_seed(std::uint64_t seed, std::string_view name);

struct RnnFit {
  std::vector<FitResult> fits;  // one per class
  NetworkBank bank;
};

struct DivergenceSummary {
  bool pass = true;
  std::vector<double> lipschitz;
  std::vector<DivergenceReport> reports;
};

/// One experiment: classes, input, plant and (lazily) the tuned bank.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const std::string& hash() const { return hash_; }
  const std::vector<SignalClass>& classes() const { return classes_; }
  const InputSignal& input() const { return input_; }
  const PlantSpec& plant() const { return plant_; }
  const SignalClass& truth_class() const;

  /// Tuning per class (computes the rho envelope on first use).
  const std::vector<TuningReport>& tuning();
  const PrototypeBank& bank();

  PlantRun plant_run(double theta) const;
  IntegrationOptions options(std::string_view stream) const;

  Trajectory simulate(double theta);
  double entry_bound();
  ConvergenceReport convergence(const Trajectory& traj, double theta);
  SweepResult sweep();
  std::vector<double> sweep_grid() const;
  double settle(const SweepResult& sweep) const;
  DecisionReport decide(const Trajectory& traj, double settle);
  NoiseBands bands();

  PersistencyEstimate persistency(const SignalClass& cls) const;
  PEReport filtered_pe() const;

  DomainBox rnn_domain(int i);
  RnnFit fit_rnn(int units);
  Trajectory simulate_rnn(const NetworkBank& bank, double theta, double horizon);
  DivergenceSummary divergence(const RnnFit& fit, double theta);

 private:
  ExperimentConfig cfg_;
  std::string hash_;
  std::vector<SignalClass> classes_;
  InputSignal input_;
  PlantSpec plant_;
  std::optional<std::vector<TuningReport>> tuning_;
  std::optional<PrototypeBank> bank_;
};

}  // namespace arnn

#endif  // ARNN_EXPERIMENT_HPP
