#include "arnn/io.hpp"

#include <cmath>
#include <ostream>

#include "arnn/experiment.hpp"

namespace arnn {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec5(const Eigen::Matrix<double, 5, 1>& v) {
  return json::array({v[0], v[1], v[2], v[3], v[4]});
}

}  // namespace

void to_json(json& j, const Interval& r) { j = json::array({num(r.lo), num(r.hi)}); }

void to_json(json& j, const RhoEnvelope& rho) {
  j = {{"slope", num(rho.slope)}, {"certified_max", num(rho.certified_max)}};
}

void to_json(json& j, const PersistencyEstimate& est) {
  json samples = json::array();
  for (const auto& s : est.rho_samples) {
    samples.push_back({{"separation", num(s.separation)}, {"deviation", num(s.deviation)}});
  }
  j = {{"window_T", num(est.window_T)},
       {"rho_samples", samples},
       {"satisfied", est.satisfied},
       {"worst_window_start", num(est.worst_window_start)}};
}

void to_json(json& j, const PrototypeConfig& c) {
  j = {{"gamma", num(c.gamma)}, {"a", c.a},         {"b", c.b},
       {"epsilon", c.epsilon},  {"delta", c.delta}, {"nu_x", c.nu_x},
       {"k_prime", c.k_prime},  {"kappa", c.kappa}, {"d", c.d}};
}

void to_json(json& j, const TuningReport& r) {
  j = {{"c", num(r.c)},
       {"gamma_star", num(r.gamma_star)},
       {"gamma", num(r.gamma)},
       {"h_star", num(r.h_star)},
       {"k_prime", r.k_prime},
       {"L", num(r.L)},
       {"error_bound", num(r.error_bound)},
       {"epsilon", num(r.epsilon)},
       {"delta", num(r.delta)},
       {"d_theta", num(r.d_theta)},
       {"d_f", num(r.d_f)},
       {"a", r.a},
       {"b", r.b},
       {"rho", r.rho},
       {"T_L_star_note", r.T_L_star_note},
       {"warnings", r.warnings}};
}

void to_json(json& j, const PEReport& r) {
  j = {{"L_window", num(r.L_window)},
       {"delta_lower", num(r.delta_lower)},
       {"input_min_integral", num(r.input_min_integral)},
       {"input_pe_ok", r.input_pe_ok},
       {"condition_value", num(r.condition_value)},
       {"condition_ok", r.condition_ok},
       {"L_star", r.L_star > 0.0 ? json(r.L_star) : json(nullptr)},
       {"delta_star", num(r.delta_star)},
       {"lower_bound_numerator", num(r.lower_bound_numerator)},
       {"p", num(r.p)},
       {"p_prime", num(r.p_prime)},
       {"integral_samples_count", r.integral_samples.size()}};
}

void to_json(json& j, const WindingBudget& wb) {
  j = {{"spent", num(wb.spent)}, {"budget", num(wb.budget)}, {"applicable", wb.applicable}};
  if (!wb.warning.empty()) j["warning"] = wb.warning;
}

void to_json(json& j, const ConvergenceReport& r) {
  j = {{"entered", r.entered},
       {"entry_time", r.entered ? json(r.entry_time) : json(nullptr)},
       {"residence", num(r.residence)},
       {"winding_spent", num(r.winding_spent)},
       {"bound_used", num(r.bound_used)},
       {"decided_class", r.decided_class ? json(*r.decided_class) : json(nullptr)}};
}

void to_json(json& j, const SweepResult& res) {
  json rows = json::array();
  for (const auto& row : res.rows) {
    json r = row.report;
    r["theta"] = row.theta;
    rows.push_back(r);
  }
  j = {{"t_prime_max", num(res.t_prime_max)}, {"all_entered", res.all_entered}, {"rows", rows}};
}

void to_json(json& j, const BoundsReport& r) {
  j = {{"pass", r.pass},
       {"max_xy", num(r.max_xy)},
       {"xy_bound", num(r.xy_bound)},
       {"max_shat", r.max_shat},
       {"shat_bound", r.shat_bound}};
}

void to_json(json& j, const DecisionReport& r) {
  json per_class = json::array();
  for (std::size_t i = 0; i < r.per_class.size(); ++i) {
    const auto& c = r.per_class[i];
    per_class.push_back({{"class", i + 1},
                         {"window_max_hf", num(c.window_max_hf)},
                         {"theta_mean", num(c.theta_mean)},
                         {"theta_min", num(c.theta_min)},
                         {"theta_max", num(c.theta_max)},
                         {"theta_final", num(c.theta_final)}});
  }
  j = {{"decided", r.decided ? json(*r.decided) : json(nullptr)},
       {"theta_estimate", r.decided ? num(r.theta_estimate) : json(nullptr)},
       {"t_prime", r.status == DecisionStatus::Undecided ? json(nullptr) : json(r.t_prime)},
       {"T_star", num(r.T_star)},
       {"band_hf", num(r.band_hf)},
       {"band_theta", num(r.band_theta)},
       {"status", to_string(r.status)},
       {"qualifying", r.qualifying},
       {"per_class", per_class}};
}

void to_json(json& j, const DomainBox& box) { j = {{"lo", vec5(box.lo)}, {"hi", vec5(box.hi)}}; }

void from_json(const json& j, DomainBox& box) {
  const auto lo = j.at("lo").get<std::vector<double>>();
  const auto hi = j.at("hi").get<std::vector<double>>();
  if (lo.size() != 5 || hi.size() != 5) throw std::invalid_argument("DomainBox: expected 5 bounds");
  for (int k = 0; k < 5; ++k) {
    box.lo[k] = lo[static_cast<std::size_t>(k)];
    box.hi[k] = hi[static_cast<std::size_t>(k)];
  }
}

void to_json(json& j, const SigmoidNetwork& net) {
  json units = json::array();
  for (int u = 0; u < net.units(); ++u) {
    units.push_back({{"omega", vec5(net.omega.row(u).transpose())}, {"beta", net.beta[u]}});
  }
  json alpha = json::array();
  for (int k = 0; k < 3; ++k) {
    alpha.push_back(std::vector<double>(net.alpha.col(k).data(), net.alpha.col(k).data() + net.units()));
  }
  j = {{"N", net.units()},   {"sigmoid", to_string(net.sigmoid)}, {"units", units},
       {"alpha", alpha},     {"domain", net.domain},              {"eps_N", num(net.eps_N)}};
}

void from_json(const json& j, SigmoidNetwork& net) {
  const int n = j.at("N").get<int>();
  const auto& units = j.at("units");
  const auto& alpha = j.at("alpha");
  if (n < 1 || units.size() != static_cast<std::size_t>(n) || alpha.size() != 3) {
    throw std::invalid_argument("SigmoidNetwork: inconsistent unit count");
  }
  net.sigmoid = sigmoid_from_string(j.at("sigmoid").get<std::string>());
  net.omega.resize(n, 5);
  net.beta.resize(n);
  net.alpha.resize(n, 3);
  for (int u = 0; u < n; ++u) {
    const auto w = units.at(static_cast<std::size_t>(u)).at("omega").get<std::vector<double>>();
    if (w.size() != 5) throw std::invalid_argument("SigmoidNetwork: omega must have 5 entries");
    for (int k = 0; k < 5; ++k) net.omega(u, k) = w[static_cast<std::size_t>(k)];
    net.beta[u] = units.at(static_cast<std::size_t>(u)).at("beta").get<double>();
  }
  for (int k = 0; k < 3; ++k) {
    const auto col = alpha.at(static_cast<std::size_t>(k)).get<std::vector<double>>();
    if (col.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("SigmoidNetwork: alpha size");
    for (int u = 0; u < n; ++u) net.alpha(u, k) = col[static_cast<std::size_t>(u)];
  }
  net.domain = j.at("domain").get<DomainBox>();
  net.eps_N = j.at("eps_N").is_null() ? 0.0 : j.at("eps_N").get<double>();
}

void to_json(json& j, const FitReport& r) {
  j = {{"N", r.units},
       {"train_error_sup", num(r.train_error_sup)},
       {"validation_error_sup", num(r.validation_error_sup)},
       {"domain", r.domain},
       {"seed", r.seed}};
}

void to_json(json& j, const DivergenceReport& r) {
  j = {{"pass", r.pass},
       {"max_gap", num(r.max_gap)},
       {"worst_time", num(r.worst_time)},
       {"worst_margin", num(r.worst_margin)},
       {"final_gap", r.gaps.empty() ? json(nullptr) : num(r.gaps.back())},
       {"final_bound", r.bounds.empty() ? json(nullptr) : num(r.bounds.back())}};
}

json stamped(json body, const std::string& config_hash) {
  body["config_hash"] = config_hash;
  body["version"] = std::string(kVersion);
  return body;
}

void write_sweep_csv(std::ostream& os, const SweepResult& res, const std::string& provenance) {
  os << "# " << provenance << '\n';
  os << "theta,entry_time,residence,winding_spent\n";
  const auto old = os.precision(17);
  for (const auto& row : res.rows) {
    os << row.theta << ',';
    if (row.report.entered) os << row.report.entry_time;
    os << ',' << row.report.residence << ',' << row.report.winding_spent << '\n';
  }
  os.precision(old);
}

}  // namespace arnn
