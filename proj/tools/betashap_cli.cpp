#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "betashap/csv.hpp"
#include "betashap/error.hpp"
#include "betashap/exact.hpp"
#include "betashap/mc.hpp"
#include "betashap/serialize.hpp"
#include "betashap/synthetic.hpp"
#include "betashap/tasks.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace betashap;
using betashap::cli::Manifest;
using betashap::cli::dump;
using betashap::cli::write_text;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;

/// Thrown after outputs are written when --strict sees a capped MC run.
struct NotConverged {};

const std::map<std::string, SyntheticKind> kKinds{
    {"gaussian-classification", SyntheticKind::gaussian_classification},
    {"gaussian-regression", SyntheticKind::gaussian_regression},
    {"snr-regression", SyntheticKind::snr_regression},
    {"snr-classification", SyntheticKind::snr_classification}};

const std::map<std::string, ModelKind> kModels{{"logistic", ModelKind::logistic_regression},
                                               {"linear", ModelKind::linear_regression},
                                               {"constant", ModelKind::constant_predictor}};

const std::map<std::string, Metric> kMetrics{{"accuracy", Metric::accuracy},
                                             {"negative-mse", Metric::negative_mse}};

template <class Map>
std::vector<std::string> keys(const Map& map) {
  std::vector<std::string> out;
  for (const auto& entry : map) out.push_back(entry.first);
  return out;
}

const std::map<std::string, CurveDirection> kDirections{{"add", CurveDirection::add},
                                                        {"remove", CurveDirection::remove}};
const std::map<std::string, CurveOrder> kOrders{{"value", CurveOrder::by_value},
                                                {"random", CurveOrder::random}};

std::string text_of(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Shared flag groups

struct Common {
  std::string out;
  std::size_t threads = 1;
  bool record_timings = false;

  void add(CLI::App* app, bool needs_threads = true) {
    app->add_option("--out", out, "Output directory")->required();
    if (needs_threads) app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_flag("--record-timings", record_timings, "Add wall-clock timings to the manifest");
  }
};

struct ModelFlags {
  std::string model;
  std::string metric;
  TrainConfig training;

  void add(CLI::App* app) {
    app->add_option("--model", model, "logistic | linear | constant (default from label kind)")
        ->check(CLI::IsMember(keys(kModels)));
    app->add_option("--metric", metric, "accuracy | negative-mse (default from label kind)")
        ->check(CLI::IsMember(keys(kMetrics)));
    app->add_option("--l2", training.l2, "L2 penalty on coefficients");
    app->add_option("--newton-iterations", training.max_iterations, "Newton iteration cap");
    app->add_option("--newton-tolerance", training.tolerance, "Gradient-norm tolerance");
  }

  UtilitySpec build(const Dataset& train, Dataset validation) const {
    UtilitySpec spec;
    const bool binary = train.label_kind() == LabelKind::binary;
    if (!model.empty()) {
      spec.model = kModels.at(model);
    } else {
      spec.model = binary ? ModelKind::logistic_regression : ModelKind::linear_regression;
    }
    if (!metric.empty()) {
      spec.metric = kMetrics.at(metric);
    } else if (spec.model == ModelKind::constant_predictor) {
      spec.metric = binary ? Metric::accuracy : Metric::negative_mse;
    } else {
      spec.metric = spec.model == ModelKind::logistic_regression ? Metric::accuracy : Metric::negative_mse;
    }
    spec.validation = std::move(validation);
    spec.training = training;
    validate_spec(spec, train);
    return spec;
  }

  static json describe(const UtilitySpec& spec) {
    return json{{"model", std::string(to_string(spec.model))},
                {"metric", std::string(to_string(spec.metric))},
                {"l2", spec.training.l2},
                {"newton_iterations", spec.training.max_iterations},
                {"newton_tolerance", spec.training.tolerance}};
  }
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void finish(Manifest& manifest, const Common& common, const Timer& timer, const fs::path& path) {
  if (common.record_timings) manifest.extra()["timings"] = json{{"wall_seconds", timer.seconds()}};
  manifest.write(path);
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  Common common;
  std::string kind;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<double> flip_fraction;
  std::string name = "data";
};

void run_gen(const GenArgs& a) {
  Timer timer;
  const fs::path dir(a.common.out);
  Dataset data = generate(kKinds.at(a.kind), a.n, a.seed);
  Manifest manifest("gen");
  manifest.config() = json{{"kind", a.kind}, {"n", a.n}, {"seed", a.seed}};
  const std::string csv_name = a.name + ".csv";
  std::optional<NoiseRecord> record;
  if (a.flip_fraction) {
    auto [flipped, rec] = flip_labels(data, *a.flip_fraction, a.seed);
    data = std::move(flipped);
    record = std::move(rec);
    manifest.config()["flip_fraction"] = *a.flip_fraction;
  }
  fs::create_directories(dir);
  save_csv(dir / csv_name, data);
  manifest.add_output(dir, csv_name);
  if (record) {
    const std::string noise_name = a.name + ".noise.json";
    write_text(dir / noise_name, dump(json(*record)));
    manifest.add_output(dir, noise_name);
  }
  finish(manifest, a.common, timer, dir / (a.name + ".manifest.json"));
}

// ---------------------------------------------------------------------------
// value

struct ValueArgs {
  Common common;
  ModelFlags model;
  std::string data;
  std::string validation;
  std::optional<double> alpha;
  std::optional<double> beta;
  bool data_shapley = false;
  bool loo_first = false;
  bool loo_last = false;
  std::string engine = "mc";
  McConfig mc;
  bool strict = false;
  bool profiles = false;
};

WeightScheme scheme_for(const ValueArgs& a, std::size_t n) {
  const int chosen = (a.alpha || a.beta ? 1 : 0) + a.data_shapley + a.loo_first + a.loo_last;
  if (chosen != 1) {
    throw CLI::ValidationError("scheme",
                               "choose exactly one of --alpha/--beta, --data-shapley, --loo-first, --loo-last");
  }
  if (a.data_shapley) return make_scheme(n, SchemeOrigin::data_shapley);
  if (a.loo_first) return make_scheme(n, SchemeOrigin::loo_first);
  if (a.loo_last) return make_scheme(n, SchemeOrigin::loo_last);
  if (!a.alpha || !a.beta) throw CLI::ValidationError("scheme", "--alpha and --beta go together");
  return make_beta_scheme(n, *a.alpha, *a.beta);
}

void run_value(const ValueArgs& a) {
  Timer timer;
  const fs::path dir(a.common.out);
  const Dataset train = load_csv(a.data);
  const Dataset validation = load_csv(a.validation);
  const WeightScheme scheme = scheme_for(a, train.size());
  const UtilitySpec spec = a.model.build(train, validation);

  Manifest manifest("value");
  manifest.add_input(a.data);
  manifest.add_input(a.validation);
  manifest.config() = json{{"engine", a.engine}, {"scheme", scheme}, {"utility", ModelFlags::describe(spec)}};
  fs::create_directories(dir);

  bool capped = false;
  if (a.engine == "exact") {
    if (train.size() > kExactLimit) {
      throw Error(ErrorKind::size_limit, "exact engine supports at most " + std::to_string(kExactLimit) +
                                             " points, got " + std::to_string(train.size()));
    }
    DataUtility game(train, spec);
    const auto table = utility_table(game, a.common.threads);
    const auto profiles = marginal_profiles_exact(table, train.ids(), a.common.threads);
    auto values = semivalue_from_profiles(profiles, scheme);
    write_text(dir / "values.csv", text_of([&](std::ostream& o) { write_values_csv(o, values); }));
    json report = values;
    report["utility_evaluations"] = table.size();
    write_text(dir / "report.json", dump(report));
    manifest.add_output(dir, "values.csv");
    manifest.add_output(dir, "report.json");
    if (a.profiles) {
      write_text(dir / "profiles.csv", text_of([&](std::ostream& o) { write_profiles_csv(o, profiles); }));
      manifest.add_output(dir, "profiles.csv");
    }
    manifest.extra()["utility_evaluations"] = table.size();
  } else {
    McConfig config = a.mc;
    config.threads = a.common.threads;
    manifest.config()["mc"] = config;
    const ValueReport report = mc_estimate(train, spec, scheme, config);
    write_text(dir / "values.csv", text_of([&](std::ostream& o) { write_values_csv(o, report.values); }));
    write_text(dir / "report.json", dump(json(report)));
    write_text(dir / "report.csv", text_of([&](std::ostream& o) { write_report_csv(o, report); }));
    for (const char* name : {"values.csv", "report.json", "report.csv"}) manifest.add_output(dir, name);
    manifest.extra()["utility_evaluations"] = report.utility_queries;
    manifest.extra()["terminated_by"] = std::string(to_string(report.terminated_by));
    capped = report.terminated_by == Termination::max_iterations;
  }
  finish(manifest, a.common, timer, dir / "manifest.json");
  if (capped && a.strict) throw NotConverged{};
}

// ---------------------------------------------------------------------------
// task detect | subsample | curve | snr

struct DetectArgs {
  Common common;
  std::string values;
  std::string noise;
};

NoiseRecord load_noise(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in).get<NoiseRecord>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, path.string() + ": " + e.what());
  }
}

void run_detect(const DetectArgs& a) {
  Timer timer;
  const fs::path dir(a.common.out);
  const ValueVector values = load_values_csv(a.values);
  const NoiseRecord record = load_noise(a.noise);
  const DetectionResult result = detect_noisy(values, record);

  Manifest manifest("task detect");
  manifest.add_input(a.values);
  manifest.add_input(a.noise);
  write_text(dir / "detection.json", dump(json(result)));
  const std::set<PointId> selected(result.selected.begin(), result.selected.end());
  const std::set<PointId> flipped(record.flipped_ids.begin(), record.flipped_ids.end());
  write_text(dir / "detection.csv", text_of([&](std::ostream& o) {
               o << "id,value,selected,flipped\n";
               for (std::size_t i = 0; i < values.size(); ++i) {
                 o << values.ids[i] << ',' << format_double(values.values[i]) << ','
                   << selected.count(values.ids[i]) << ',' << flipped.count(values.ids[i]) << '\n';
               }
             }));
  manifest.add_output(dir, "detection.json");
  manifest.add_output(dir, "detection.csv");
  finish(manifest, a.common, timer, dir / "manifest.json");
}

struct SubsampleArgs {
  Common common;
  ModelFlags model;
  std::string data;
  std::string values;
  std::string test;
  double keep = 0.25;
  std::uint64_t seed = 0;
  bool uniform = false;
};

void run_subsample(const SubsampleArgs& a) {
  Timer timer;
  const fs::path dir(a.common.out);
  const Dataset train = load_csv(a.data);
  const Dataset test = load_csv(a.test);
  const UtilitySpec spec = a.model.build(train, test);
  Manifest manifest("task subsample");
  manifest.add_input(a.data);
  manifest.add_input(a.test);
  SubsampleResult result;
  if (a.uniform) {
    result = subsample_uniform(train, spec, test, a.keep, a.seed);
  } else {
    if (a.values.empty()) throw CLI::ValidationError("--values", "required unless --uniform");
    manifest.add_input(a.values);
    result = subsample_train_eval(train, load_values_csv(a.values), spec, test, a.keep, a.seed);
  }
  manifest.config() = json{{"keep", a.keep},
                           {"seed", a.seed},
                           {"sampling", a.uniform ? "uniform" : "value-weighted"},
                           {"utility", ModelFlags::describe(spec)}};
  write_text(dir / "subsample.json", dump(json(result)));
  write_text(dir / "subsample.csv", text_of([&](std::ostream& o) {
               o << "draw,id,weight\n";
               for (std::size_t k = 0; k < result.sampled_ids.size(); ++k) {
                 o << k << ',' << result.sampled_ids[k] << ',' << format_double(result.train_weights[k]) << '\n';
               }
             }));
  manifest.add_output(dir, "subsample.json");
  manifest.add_output(dir, "subsample.csv");
  finish(manifest, a.common, timer, dir / "manifest.json");
}

struct CurveArgs {
  Common common;
  ModelFlags model;
  std::string data;
  std::string validation;
  std::string values;
  std::string direction = "remove";
  std::string order = "value";
  CurveOptions options;
};

void run_curve(const CurveArgs& a) {
  Timer timer;
  const fs::path dir(a.common.out);
  const Dataset train = load_csv(a.data);
  const UtilitySpec spec = a.model.build(train, load_csv(a.validation));
  CurveOptions options = a.options;
  options.direction = kDirections.at(a.direction);
  options.order = kOrders.at(a.order);
  const CurveResult result = point_curve(train, load_values_csv(a.values), spec, options);

  Manifest manifest("task curve");
  manifest.add_input(a.data);
  manifest.add_input(a.validation);
  manifest.add_input(a.values);
  manifest.config() = json{{"direction", std::string(to_string(options.direction))},
                           {"order", std::string(to_string(options.order))},
                           {"steps", result.sequence.size()},
                           {"initial_size", a.options.initial_size},
                           {"seed", a.options.seed},
                           {"utility", ModelFlags::describe(spec)}};
  write_text(dir / "curve.json", dump(json(result)));
  write_text(dir / "curve.csv", text_of([&](std::ostream& o) {
               o << "step,id,utility\n";
               for (std::size_t k = 0; k < result.utility.size(); ++k) {
                 o << k << ',';
                 if (k > 0) o << result.sequence[k - 1];
                 o << ',' << format_double(result.utility[k]) << '\n';
               }
             }));
  manifest.add_output(dir, "curve.json");
  manifest.add_output(dir, "curve.csv");
  finish(manifest, a.common, timer, dir / "manifest.json");
}

struct SnrArgs {
  Common common;
  SnrOptions options;
  std::string kind = "snr-classification";
  std::vector<std::size_t> grid{2, 50, 150, 400};
};

void run_snr(SnrArgs a) {
  Timer timer;
  const fs::path dir(a.common.out);
  a.options.grid = a.grid;
  a.options.kind = kKinds.at(a.kind);
  a.options.threads = a.common.threads;
  const SnrProfile profile = snr_scan(a.options);

  Manifest manifest("task snr");
  json config = profile;
  for (const char* key : {"rows", "estimates", "target_label", "zeta_reference"}) config.erase(key);
  config["l2"] = a.options.training.l2;
  manifest.config() = config;
  write_text(dir / "snr.json", dump(json(profile)));
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  write_text(dir / "snr.csv", text_of([&](std::ostream& o) {
               o << "j,mean,std,snr,zeta,zeta_ratio\n";
               for (const auto& row : profile.rows) {
                 o << row.j << ',' << format_double(row.mean) << ',' << format_double(row.std) << ','
                   << opt(row.snr) << ',' << format_double(row.zeta) << ',' << opt(row.zeta_ratio) << '\n';
               }
             }));
  manifest.add_output(dir, "snr.json");
  manifest.add_output(dir, "snr.csv");
  finish(manifest, a.common, timer, dir / "manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta Shapley data valuation"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--kind", gen.kind, "Dataset kind")->required()->check(CLI::IsMember(keys(kKinds)));
  gen_cmd->add_option("--n", gen.n, "Number of points")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--flip-fraction", gen.flip_fraction, "Flip this fraction of labels")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--name", gen.name, "Base name of the output files");
  gen.common.add(gen_cmd, false);

  ValueArgs value;
  auto* value_cmd = app.add_subcommand("value", "Compute data values");
  value_cmd->add_option("--data", value.data, "Training CSV")->required();
  value_cmd->add_option("--validation", value.validation, "Validation CSV")->required();
  value_cmd->add_option("--alpha", value.alpha, "Beta weight alpha");
  value_cmd->add_option("--beta", value.beta, "Beta weight beta");
  value_cmd->add_flag("--data-shapley", value.data_shapley, "Shapley weights");
  value_cmd->add_flag("--loo-first", value.loo_first, "Marginal at cardinality 2 only");
  value_cmd->add_flag("--loo-last", value.loo_last, "Leave-one-out");
  value_cmd->add_option("--engine", value.engine, "exact | mc")
      ->check(CLI::IsMember({"exact", "mc"}))
      ->capture_default_str();
  value_cmd->add_option("--chains", value.mc.chains, "MC chains")->capture_default_str();
  value_cmd->add_option("--rho", value.mc.rho, "Gelman-Rubin threshold")->capture_default_str();
  value_cmd->add_option("--min-iter", value.mc.min_iterations, "Iterations before the first check")
      ->capture_default_str();
  value_cmd->add_option("--max-iter", value.mc.max_iterations, "Iteration cap per chain")
      ->capture_default_str();
  value_cmd->add_option("--check-every", value.mc.check_every, "Iterations between checks")
      ->capture_default_str();
  value_cmd->add_option("--seed", value.mc.seed, "Seed");
  value_cmd->add_flag("--strict", value.strict, "Exit 3 when the iteration cap is hit");
  value_cmd->add_flag("--profiles", value.profiles, "Also write marginal profiles (exact engine)");
  value.model.add(value_cmd);
  value.common.add(value_cmd);

  auto* task_cmd = app.add_subcommand("task", "Downstream tasks");
  task_cmd->require_subcommand(1);

  DetectArgs detect;
  auto* detect_cmd = task_cmd->add_subcommand("detect", "Noisy label detection");
  detect_cmd->add_option("--values", detect.values, "Values CSV")->required();
  detect_cmd->add_option("--noise", detect.noise, "Noise record JSON")->required();
  detect.common.add(detect_cmd, false);

  SubsampleArgs sub;
  auto* sub_cmd = task_cmd->add_subcommand("subsample", "Learning with value-weighted subsamples");
  sub_cmd->add_option("--data", sub.data, "Training CSV")->required();
  sub_cmd->add_option("--values", sub.values, "Values CSV");
  sub_cmd->add_option("--test", sub.test, "Held-out CSV")->required();
  sub_cmd->add_option("--keep", sub.keep, "Fraction kept")->capture_default_str();
  sub_cmd->add_option("--seed", sub.seed, "Seed");
  sub_cmd->add_flag("--uniform", sub.uniform, "Uniform sampling with unit weights");
  sub.model.add(sub_cmd);
  sub.common.add(sub_cmd, false);

  CurveArgs curve;
  auto* curve_cmd = task_cmd->add_subcommand("curve", "Point addition or removal");
  curve_cmd->add_option("--data", curve.data, "Training CSV")->required();
  curve_cmd->add_option("--validation", curve.validation, "Validation CSV")->required();
  curve_cmd->add_option("--values", curve.values, "Values CSV")->required();
  curve_cmd->add_option("--direction", curve.direction, "add | remove")
      ->check(CLI::IsMember(keys(kDirections)))
      ->capture_default_str();
  curve_cmd->add_option("--order", curve.order, "value | random")
      ->check(CLI::IsMember(keys(kOrders)))
      ->capture_default_str();
  curve_cmd->add_option("--steps", curve.options.steps, "Steps (default n/2)");
  curve_cmd->add_option("--initial-size", curve.options.initial_size, "Initial set size for addition")
      ->capture_default_str();
  curve_cmd->add_option("--seed", curve.options.seed, "Seed");
  curve.model.add(curve_cmd);
  curve.common.add(curve_cmd, false);

  SnrArgs snr;
  auto* snr_cmd = task_cmd->add_subcommand("snr", "Signal-to-noise scan of marginal contributions");
  snr_cmd->add_option("--kind", snr.kind, "Dataset kind")
      ->check(CLI::IsMember(keys(kKinds)))
      ->capture_default_str();
  snr_cmd->add_option("--n", snr.options.n, "Dataset size")->capture_default_str();
  snr_cmd->add_option("--grid", snr.grid, "Cardinalities")->delimiter(',');
  snr_cmd->add_option("--repeats", snr.options.repeats, "Background draws")->capture_default_str();
  snr_cmd->add_option("--samples", snr.options.samples, "Subsets per cardinality")->capture_default_str();
  snr_cmd->add_option("--validation-size", snr.options.validation_size, "Validation size (default n)");
  snr_cmd->add_flag("--flip-target", snr.options.flip_target, "Give the target point the wrong label");
  snr_cmd->add_option("--background-flip", snr.options.background_flip, "Flip fraction in the background");
  snr_cmd->add_option("--l2", snr.options.training.l2, "L2 penalty");
  snr_cmd->add_option("--seed", snr.options.seed, "Seed");
  snr.common.add(snr_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) run_gen(gen);
    if (*value_cmd) run_value(value);
    if (*detect_cmd) run_detect(detect);
    if (*sub_cmd) run_subsample(sub);
    if (*curve_cmd) run_curve(curve);
    if (*snr_cmd) run_snr(snr);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotConverged&) {
    std::cerr << "warning: iteration cap reached before convergence\n";
    return kExitNotConverged;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
