#include "betashap/serialize.hpp"

#include "betashap/error.hpp"

namespace betashap {

namespace {

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

// nlohmann writes non-finite doubles as null; keep +inf R-hat readable.
json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

void to_json(json& out, const WeightScheme& scheme) {
  out = json{{"n", scheme.n()}, {"origin", std::string(to_string(scheme.origin()))}};
  if (const auto p = scheme.beta_params()) {
    out["alpha"] = p->alpha;
    out["beta"] = p->beta;
  }
  out["raw"] = std::vector<double>(scheme.raw().begin(), scheme.raw().end());
  out["normalized"] = std::vector<double>(scheme.normalized().begin(), scheme.normalized().end());
}

WeightScheme scheme_from_json(const json& in) {
  const auto origin = in.at("origin").get<std::string>();
  const auto n = in.at("n").get<std::size_t>();
  if (origin == "beta") {
    return make_beta_scheme(n, in.at("alpha").get<double>(), in.at("beta").get<double>());
  }
  if (origin == "data-shapley") return make_scheme(n, SchemeOrigin::data_shapley);
  if (origin == "loo-first") return make_scheme(n, SchemeOrigin::loo_first);
  if (origin == "loo-last") return make_scheme(n, SchemeOrigin::loo_last);
  if (origin == "explicit") return make_explicit_scheme(in.at("raw").get<std::vector<double>>());
  throw Error(ErrorKind::parse_error, "unknown scheme origin '" + origin + "'");
}

void to_json(json& out, const ValueVector& values) {
  out = json{{"mode", std::string(to_string(values.mode))},
             {"ids", values.ids},
             {"values", values.values}};
  if (values.scheme) out["scheme"] = *values.scheme;
}

void to_json(json& out, const MarginalProfile& profile) {
  out = json{{"id", profile.id},
             {"mean", profile.mean},
             {"variance", profile.variance},
             {"count", profile.count}};
}

void to_json(json& out, const McConfig& c) {
  out = json{{"chains", c.chains},
             {"rho", c.rho},
             {"min_iterations", c.min_iterations},
             {"max_iterations", c.max_iterations},
             {"check_every", c.check_every},
             {"seed", c.seed}};
}

void to_json(json& out, const ValueReport& report) {
  out = report.values;
  json rhat = json::array();
  for (double r : report.rhat) rhat.push_back(finite_or_string(r));
  out["rhat"] = std::move(rhat);
  out["standard_error"] = report.standard_error;
  out["chains"] = report.chains;
  out["iterations_per_chain"] = report.iterations_per_chain;
  out["utility_queries"] = report.utility_queries;
  out["terminated_by"] = std::string(to_string(report.terminated_by));
}

void to_json(json& out, const NoiseRecord& record) {
  out = json{{"fraction", record.fraction}, {"flipped_ids", record.flipped_ids}};
}

void from_json(const json& in, NoiseRecord& record) {
  record.fraction = in.value("fraction", 0.0);
  record.flipped_ids = in.at("flipped_ids").get<std::vector<PointId>>();
}

void to_json(json& out, const Dataset& data) {
  json points = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    points.push_back(json{{"id", data.id(i)},
                          {"x", std::vector<double>(data.row(i).begin(), data.row(i).end())},
                          {"y", data.label(i)}});
  }
  out = json{{"dim", data.dim()},
             {"label_kind", std::string(to_string(data.label_kind()))},
             {"feature_names", data.feature_names()},
             {"label_column", "y"},
             {"points", std::move(points)}};
}

void to_json(json& out, const DetectionResult& r) {
  out = json{{"selected_ids", r.selected},
             {"cluster_centers", {r.low_center, r.high_center}},
             {"threshold", r.threshold},
             {"precision", r.score.precision},
             {"recall", r.score.recall},
             {"f1", r.score.f1},
             {"degenerate", r.degenerate}};
}

void to_json(json& out, const SubsampleResult& r) {
  out = json{{"keep_fraction", r.keep_fraction},
             {"sampled_ids", r.sampled_ids},
             {"train_weights", r.train_weights},
             {"accuracy", r.accuracy},
             {"insufficient_positive_values", r.insufficient_positive_values}};
}

void to_json(json& out, const CurveResult& r) {
  out = json{{"direction", std::string(to_string(r.direction))},
             {"order", std::string(to_string(r.order))},
             {"initial_set", r.initial_set},
             {"sequence", r.sequence},
             {"utility", r.utility},
             {"relative_area", r.relative_area}};
}

void to_json(json& out, const SnrProfile& p) {
  json rows = json::array();
  for (const auto& row : p.rows) {
    rows.push_back(json{{"j", row.j},
                        {"mean", row.mean},
                        {"std", row.std},
                        {"snr", optional_number(row.snr)},
                        {"zeta", row.zeta},
                        {"zeta_ratio", optional_number(row.zeta_ratio)}});
  }
  const auto& o = p.options;
  out = json{{"kind", std::string(to_string(o.kind))},
             {"n", o.n},
             {"grid", o.grid},
             {"repeats", o.repeats},
             {"samples", o.samples},
             {"validation_size", o.validation_size == 0 ? o.n : o.validation_size},
             {"flip_target", o.flip_target},
             {"background_flip", o.background_flip},
             {"seed", o.seed},
             {"target_label", p.target_label},
             {"zeta_reference", p.zeta_reference},
             {"rows", std::move(rows)},
             {"estimates", p.estimates}};
}

}  // namespace betashap
