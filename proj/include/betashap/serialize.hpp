#pragma once

#include <json.hpp>

#include "betashap/dataset.hpp"
#include "betashap/exact.hpp"
#include "betashap/mc.hpp"
#include "betashap/synthetic.hpp"
#include "betashap/tasks.hpp"
#include "betashap/valuation.hpp"
#include "betashap/weights.hpp"

namespace betashap {

using json = nlohmann::json;

void to_json(json& out, const WeightScheme& scheme);
void to_json(json& out, const ValueVector& values);
void to_json(json& out, const MarginalProfile& profile);
void to_json(json& out, const ValueReport& report);
void to_json(json& out, const McConfig& config);
void to_json(json& out, const NoiseRecord& record);
void from_json(const json& in, NoiseRecord& record);
void to_json(json& out, const Dataset& data);
void to_json(json& out, const DetectionResult& result);
void to_json(json& out, const SubsampleResult& result);
void to_json(json& out, const CurveResult& result);
void to_json(json& out, const SnrProfile& profile);

/// Rebuilds a scheme from its JSON form ({n, origin, alpha?, beta?, raw}).
WeightScheme scheme_from_json(const json& in);

}  // namespace betashap
