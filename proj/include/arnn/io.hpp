#ifndef ARNN_IO_HPP
#define ARNN_IO_HPP

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "arnn/analysis.hpp"
#include "arnn/classifier.hpp"
#include "arnn/prototype.hpp"
#include "arnn/rnn.hpp"
#include "arnn/signals.hpp"

// JSON conversions for reports and networks. Non-finite numbers are written
// as null.
namespace arnn {

void to_json(nlohmann::json& j, const Interval& r);
void to_json(nlohmann::json& j, const RhoEnvelope& rho);
void to_json(nlohmann::json& j, const PersistencyEstimate& est);
void to_json(nlohmann::json& j, const PrototypeConfig& cfg);
void to_json(nlohmann::json& j, const TuningReport& rep);
void to_json(nlohmann::json& j, const PEReport& rep);
void to_json(nlohmann::json& j, const WindingBudget& wb);
void to_json(nlohmann::json& j, const ConvergenceReport& rep);
void to_json(nlohmann::json& j, const SweepResult& res);
void to_json(nlohmann::json& j, const BoundsReport& rep);
void to_json(nlohmann::json& j, const DecisionReport& rep);
void to_json(nlohmann::json& j, const DomainBox& box);
void to_json(nlohmann::json& j, const SigmoidNetwork& net);
void to_json(nlohmann::json& j, const FitReport& rep);
void to_json(nlohmann::json& j, const DivergenceReport& rep);

void from_json(const nlohmann::json& j, DomainBox& box);
void from_json(const nlohmann::json& j, SigmoidNetwork& net);

/// Adds config_hash and tool version to a report object.
nlohmann::json stamped(nlohmann::json body, const std::string& config_hash);

/// theta,entry_time,residence,winding_spent (entry_time empty when not entered).
void write_sweep_csv(std::ostream& os, const SweepResult& res, const std::string& provenance);

}  // namespace arnn

#endif  // ARNN_IO_HPP
