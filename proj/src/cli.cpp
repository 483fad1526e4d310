#include "riverflow/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "riverflow/csv.hpp"
#include "riverflow/errors.hpp"
#include "riverflow/ingest.hpp"
#include "riverflow/model_file.hpp"
#include "riverflow/sensitivity.hpp"
#include "riverflow/training.hpp"

namespace riverflow::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { Table, Csv };

struct GlobalOptions {
  std::uint64_t seed = TrainingHyperparams{}.seed;
  OutputFormat format = OutputFormat::Table;
  bool quiet = false;
};

// Where a command writes its data and diagnostics.
struct Streams {
  std::ostream& out;
  std::ostream& err;
  bool quiet;

  std::ostream& info() {
    static std::ostream null(nullptr);
    return quiet ? null : err;
  }
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

// Re-throws a parse error with the file name in front.
template <typename Fn>
auto with_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Writes `emit` to `path`, or to `fallback` when the path is "-".
void write_output(const std::string& path, std::ostream& fallback,
                  const std::function<void(std::ostream&)>& emit) {
  if (path == "-") {
    emit(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  emit(file);
  if (!file) throw IoError("failed writing " + path);
}

std::vector<FeatureRecord> load_features(const std::string& path) {
  auto in = open_input(path);
  return with_path(path, [&] { return read_feature_csv(in); });
}

std::vector<FeatureRecord> with_discharge(const std::vector<FeatureRecord>& records) {
  std::vector<FeatureRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const FeatureRecord& r) { return r.discharge_mjj.has_value(); });
  return out;
}

void add_hyperparam_flags(CLI::App* cmd, TrainingHyperparams& hp) {
  cmd->add_option("--learning-rate", hp.learning_rate, "Gradient step size")
      ->capture_default_str();
  cmd->add_option("--momentum", hp.momentum_coefficient, "Momentum coefficient in [0, 1)")
      ->capture_default_str();
  cmd->add_option("--max-epochs", hp.max_epochs, "Maximum number of batch epochs")
      ->capture_default_str();
  cmd->add_option("--target-mse", hp.target_mse, "Stop once normalized training MSE reaches this")
      ->capture_default_str();
}

// Node / MSE / r / % Error rows, optionally with a Best marker column.
void print_metrics(std::ostream& out, OutputFormat format, const std::vector<SweepRow>& rows,
                   std::optional<std::size_t> best) {
  if (format == OutputFormat::Csv) {
    out << "Node,MSE,r,% Error" << (best ? ",Best" : "") << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Metrics& m = rows[i].metrics;
      out << rows[i].node_count << ',' << csv::format_fixed(m.mse, 6) << ','
          << csv::format_fixed(m.r, 4) << ',' << csv::format_fixed(m.pct_error, 4);
      if (best) out << ',' << (i == *best ? "*" : "");
      out << '\n';
    }
    return;
  }
  out << std::setw(4) << "Node" << std::setw(11) << "MSE" << std::setw(9) << "r"
      << std::setw(10) << "% Error" << (best ? "  Best" : "") << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Metrics& m = rows[i].metrics;
    out << std::setw(4) << rows[i].node_count << std::setw(11) << csv::format_fixed(m.mse, 6)
        << std::setw(9) << csv::format_fixed(m.r, 4) << std::setw(10)
        << csv::format_fixed(m.pct_error, 4);
    if (best && i == *best) out << "     *";
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string climate;
  std::string discharge;
  std::string out = "-";
};

void cmd_ingest(const IngestArgs& a, Streams s) {
  std::vector<ClimateDaily> climate;
  std::vector<DischargeDaily> discharge;
  {
    auto in = open_input(a.climate);
    climate = with_path(a.climate, [&] { return parse_climate_csv(in); });
  }
  {
    auto in = open_input(a.discharge);
    discharge = with_path(a.discharge, [&] { return parse_discharge_csv(in); });
  }
  const FeatureTable table = build_feature_table(climate, discharge);
  write_output(a.out, s.out, [&](std::ostream& o) { write_feature_csv(o, table.records); });

  auto& info = s.info();
  info << "ingest: " << table.records.size() << " year(s) written, " << table.exclusions.size()
       << " excluded\n";
  for (const auto& x : table.exclusions) info << "excluded " << x.year << ": " << x.reason << '\n';
  for (const auto& w : table.warnings) info << "warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string features;
  std::string model_out;
  std::size_t hidden_nodes = kDefaultHiddenNodes;
  TrainingHyperparams hp;
  bool loocv = false;
};

std::string provenance_for(const std::string& features_path,
                           const std::vector<FeatureRecord>& records) {
  std::ostringstream p;
  p << "features=" << features_path << "; records=" << records.size();
  if (!records.empty()) {
    const auto [lo, hi] = std::minmax_element(
        records.begin(), records.end(),
        [](const FeatureRecord& a, const FeatureRecord& b) { return a.year < b.year; });
    p << "; years=" << lo->year << "-" << hi->year;
  }
  return p.str();
}

void cmd_train(TrainArgs a, const GlobalOptions& g, Streams s) {
  a.hp.seed = g.seed;
  const auto records = load_features(a.features);
  const TrainedModel trained = train(records, a.hidden_nodes, a.hp);
  save_model(a.model_out, ModelFile::from_trained(trained, provenance_for(a.features, records)));

  s.info() << "train: " << a.hidden_nodes << " hidden nodes, " << trained.epoch_count
           << " epochs, model written to " << a.model_out << '\n';
  print_metrics(s.out, g.format, {{a.hidden_nodes, trained.training_metrics}}, std::nullopt);
  if (a.loocv) {
    s.info() << "leave-one-out cross-validation:\n";
    print_metrics(s.out, g.format, {{a.hidden_nodes, leave_one_out(records, a.hidden_nodes, a.hp)}},
                  std::nullopt);
  }
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string features;
  std::vector<std::size_t> nodes;
  std::size_t min_nodes = 3;
  std::size_t max_nodes = 8;
  TrainingHyperparams hp;
  bool sequential = false;
};

void cmd_sweep(SweepArgs a, const GlobalOptions& g, Streams s) {
  a.hp.seed = g.seed;
  std::vector<std::size_t> counts = a.nodes;
  if (counts.empty()) {
    if (a.min_nodes < 1 || a.max_nodes < a.min_nodes) {
      throw UsageError("node range must satisfy 1 <= --min-nodes <= --max-nodes");
    }
    for (std::size_t n = a.min_nodes; n <= a.max_nodes; ++n) counts.push_back(n);
  }
  const auto records = load_features(a.features);
  const SweepResult result = sweep(records, counts, a.hp, !a.sequential);
  print_metrics(s.out, g.format, result.rows, result.best_index);
  s.info() << "sweep: lowest MSE at " << result.rows[result.best_index].node_count
           << " hidden nodes\n";
}

// ---------------------------------------------------------------------------
// predict

struct TemperatureFlags {
  std::optional<double> fahrenheit;
  std::optional<double> rankine;

  std::optional<double> as_rankine() const {
    if (fahrenheit) return fahrenheit_to_rankine(*fahrenheit);
    return rankine;
  }
};

CLI::Option* add_temperature_flags(CLI::App* cmd, TemperatureFlags& t) {
  auto* f = cmd->add_option("--temp-f", t.fahrenheit, "Mean May-Jul temperature, degrees F");
  auto* r = cmd->add_option("--temp-r", t.rankine, "Mean May-Jul temperature, degrees Rankine");
  f->excludes(r);
  return f;
}

struct PredictArgs {
  std::string model;
  double swe = 0.0;
  double precip = 0.0;
  TemperatureFlags temp;
};

void cmd_predict(const PredictArgs& a, Streams s) {
  const auto temp = a.temp.as_rankine();
  if (!temp) throw UsageError("one of --temp-f or --temp-r is required");
  const ModelFile file = load_model(a.model);
  s.out << csv::format_fixed(file.model.predict(a.swe, a.precip, *temp), 2) << '\n';
}

// ---------------------------------------------------------------------------
// sensitivity

struct SensitivityArgs {
  std::string model;
  std::string preset;
  std::string vary;
  std::optional<double> swe;
  std::optional<double> precip;
  TemperatureFlags temp;
  std::vector<double> multipliers;
  std::vector<double> offsets;
  bool rank = false;
  double perturbation = 0.1;
};

// Preset grids fix the base temperature at 505 R exactly.
constexpr double kPresetTempRankine = 505.0;
constexpr double kPresetSwe = 5.0;
constexpr double kPresetPrecip = 4.0;
const std::vector<double> kPresetMultipliers{2, 3, 4, 5};

std::vector<ScanSpec> preset_scans(const SensitivityArgs& a) {
  auto reject = [&](bool given, const char* flag) {
    if (given) throw UsageError(std::string(flag) + " is fixed by preset " + a.preset);
  };
  reject(!a.vary.empty(), "--vary");
  reject(!a.multipliers.empty(), "--multipliers");
  reject(!a.offsets.empty(), "--offsets");
  reject(a.temp.fahrenheit || a.temp.rankine, "temperature");

  std::vector<ScanSpec> scans;
  if (a.preset == "table3") {
    reject(a.precip.has_value(), "--precip");
    for (double p : {4.0, 8.0, 12.0, 16.0}) {
      scans.push_back({InputKind::Snowpack, {a.swe.value_or(kPresetSwe), p, kPresetTempRankine},
                       kPresetMultipliers, {}});
    }
  } else if (a.preset == "table4") {
    reject(a.swe.has_value(), "--swe");
    for (double w : {5.0, 10.0, 15.0, 20.0}) {
      scans.push_back({InputKind::Precipitation,
                       {w, a.precip.value_or(kPresetPrecip), kPresetTempRankine},
                       kPresetMultipliers, {}});
    }
  } else if (a.preset == "table5") {
    reject(a.swe.has_value(), "--swe");
    reject(a.precip.has_value(), "--precip");
    scans.push_back({InputKind::Temperature,
                     {kPresetSwe, kPresetPrecip, kPresetTempRankine},
                     {},
                     {2.5, 5.0}});
  } else {
    throw UsageError("unknown preset '" + a.preset + "', expected table3, table4 or table5");
  }
  return scans;
}

BasePoint explicit_base(const SensitivityArgs& a) {
  const auto temp = a.temp.as_rankine();
  if (!a.swe || !a.precip || !temp) {
    throw UsageError("--swe, --precip and one of --temp-f/--temp-r are required");
  }
  return {*a.swe, *a.precip, *temp};
}

void write_scan(std::ostream& out, const SensitivityTable& t) {
  const ScanSpec& sp = t.spec;
  std::string flagged;
  for (const auto& r : t.rows) {
    if (!r.extrapolated) continue;
    if (!flagged.empty()) flagged += ';';
    flagged += csv::format_number(r.change);
  }
  out << "# varied: " << to_string(sp.varied) << '\n'
      << "# base_swe_in: " << csv::format_number(sp.base.swe) << '\n'
      << "# base_precip_in: " << csv::format_number(sp.base.precip) << '\n'
      << "# base_temp_r: " << csv::format_number(sp.base.temp_rankine) << '\n'
      << "# base_discharge_cfs: " << csv::format_fixed(t.base_discharge, 6) << '\n'
      << "# change_unit: "
      << (sp.varied == InputKind::Temperature ? "offset_degF" : "multiplier") << '\n'
      << "# extrapolated: " << (flagged.empty() ? "none" : flagged) << '\n'
      << "change,discharge_cfs,ratio,pct_change,flag\n";
  for (const auto& r : t.rows) {
    out << csv::format_number(r.change) << ',' << csv::format_fixed(r.discharge, 6) << ','
        << csv::format_fixed(r.ratio, 6) << ',' << csv::format_fixed(r.pct_change, 6) << ','
        << (r.extrapolated ? "extrapolated" : "") << '\n';
  }
}

void cmd_sensitivity(const SensitivityArgs& a, Streams s) {
  const ModelFile file = load_model(a.model);

  if (a.rank) {
    if (!a.preset.empty()) throw UsageError("--rank cannot be combined with --preset");
    const auto ranking = rank_input_influence(file.model, explicit_base(a), a.perturbation);
    s.out << "rank,input,abs_pct_change,tied\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      s.out << i + 1 << ',' << to_string(ranking[i].input) << ','
            << csv::format_fixed(ranking[i].abs_pct_change, 6) << ','
            << (ranking[i].tied ? "yes" : "no") << '\n';
    }
    return;
  }

  std::vector<ScanSpec> scans;
  if (!a.preset.empty()) {
    scans = preset_scans(a);
  } else {
    const auto kind = parse_input_kind(a.vary);
    if (!kind) throw UsageError("--vary must be snowpack, precipitation or temperature");
    ScanSpec spec{*kind, explicit_base(a), a.multipliers, a.offsets};
    if (spec.varied == InputKind::Temperature && spec.offsets_f.empty()) {
      throw UsageError("temperature scans need --offsets");
    }
    if (spec.varied != InputKind::Temperature && spec.multipliers.empty()) {
      throw UsageError(std::string(to_string(spec.varied)) + " scans need --multipliers");
    }
    scans.push_back(std::move(spec));
  }

  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (i) s.out << '\n';
    const SensitivityTable table = run_scan(file.model, scans[i]);
    write_scan(s.out, table);
    for (const auto& r : table.rows) {
      if (r.extrapolated) {
        s.info() << "warning: " << to_string(scans[i].varied) << " change "
                 << csv::format_number(r.change) << " exceeds " << kExtrapolationFactor
                 << "x the training maximum\n";
      }
    }
  }
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string model;
  std::string features;
  std::string out = "-";
};

void cmd_report(const ReportArgs& a, Streams s) {
  const ModelFile file = load_model(a.model);
  const auto records = with_discharge(load_features(a.features));
  write_output(a.out, s.out, [&](std::ostream& o) {
    o << "year,actual_cfs,predicted_cfs,residual\n";
    for (const auto& r : records) {
      const double predicted = file.model.predict(r.swe_may1, r.precip_mjj, r.temp_mjj_rankine);
      o << r.year << ',' << csv::format_number(*r.discharge_mjj) << ','
        << csv::format_number(predicted) << ',' << csv::format_number(*r.discharge_mjj - predicted)
        << '\n';
    }
  });
  s.info() << "report: " << records.size() << " year(s)\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seasonal river discharge forecasting with a small feed-forward network",
               args.empty() ? "riverflow" : args.front()};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for weight initialization")->capture_default_str();
  std::string format_name = "table";
  app.add_option("--format", format_name, "Metric table format")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress informational messages on stderr");

  std::function<void()> action;

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Build the seasonal feature table from daily CSVs");
  ingest->add_option("--climate", ingest_args.climate, "Daily climate CSV")->required();
  ingest->add_option("--discharge", ingest_args.discharge, "Daily discharge CSV")->required();
  ingest->add_option("-o,--out", ingest_args.out, "Feature table output ('-' for stdout)")
      ->capture_default_str();
  ingest->callback([&] { action = [&] { cmd_ingest(ingest_args, {out, err, g.quiet}); }; });

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a network and write a model file");
  train_cmd->add_option("--features", train_args.features, "Feature table CSV")->required();
  train_cmd->add_option("-o,--model-out", train_args.model_out, "Model file to write")->required();
  train_cmd->add_option("--hidden-nodes", train_args.hidden_nodes, "Hidden layer size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_hyperparam_flags(train_cmd, train_args.hp);
  train_cmd->add_flag("--loocv", train_args.loocv, "Also report leave-one-out metrics");
  train_cmd->callback([&] { action = [&] { cmd_train(train_args, g, {out, err, g.quiet}); }; });

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train one network per hidden node count");
  sweep_cmd->add_option("--features", sweep_args.features, "Feature table CSV")->required();
  sweep_cmd->add_option("--nodes", sweep_args.nodes, "Explicit node counts, e.g. 3,5,7")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep_cmd
      ->add_option("--min-nodes", sweep_args.min_nodes, "Smallest node count when --nodes is not given")
      ->capture_default_str();
  sweep_cmd
      ->add_option("--max-nodes", sweep_args.max_nodes, "Largest node count when --nodes is not given")
      ->capture_default_str();
  add_hyperparam_flags(sweep_cmd, sweep_args.hp);
  sweep_cmd->add_flag("--sequential", sweep_args.sequential, "Train node counts one at a time");
  sweep_cmd->callback([&] { action = [&] { cmd_sweep(sweep_args, g, {out, err, g.quiet}); }; });

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Predict mean May-Jul discharge in CFS");
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  predict_cmd->add_option("--swe", predict_args.swe, "May 1 snow water equivalent, inches")
      ->required();
  predict_cmd->add_option("--precip", predict_args.precip, "May-Jul precipitation, inches")
      ->required();
  add_temperature_flags(predict_cmd, predict_args.temp);
  predict_cmd->callback([&] { action = [&] { cmd_predict(predict_args, {out, err, g.quiet}); }; });

  SensitivityArgs sens_args;
  auto* sens_cmd = app.add_subcommand("sensitivity", "One-at-a-time input scans");
  sens_cmd->add_option("--model", sens_args.model, "Model file")->required();
  sens_cmd->add_option("--preset", sens_args.preset, "table3, table4 or table5");
  sens_cmd->add_option("--vary", sens_args.vary, "snowpack, precipitation or temperature");
  sens_cmd->add_option("--swe", sens_args.swe, "Base snow water equivalent, inches");
  sens_cmd->add_option("--precip", sens_args.precip, "Base precipitation, inches");
  add_temperature_flags(sens_cmd, sens_args.temp);
  sens_cmd->add_option("--multipliers", sens_args.multipliers, "Multipliers, e.g. 1,2,3")
      ->delimiter(',');
  sens_cmd->add_option("--offsets", sens_args.offsets, "Temperature offsets in degrees F")
      ->delimiter(',');
  sens_cmd->add_flag("--rank", sens_args.rank, "Rank inputs by influence instead of scanning");
  sens_cmd->add_option("--perturbation", sens_args.perturbation,
                       "Fraction of each input's training range used by --rank")
      ->capture_default_str();
  sens_cmd->callback([&] { action = [&] { cmd_sensitivity(sens_args, {out, err, g.quiet}); }; });

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Per-year actual vs predicted discharge");
  report_cmd->add_option("--model", report_args.model, "Model file")->required();
  report_cmd->add_option("--features", report_args.features, "Feature table CSV")->required();
  report_cmd->add_option("-o,--out", report_args.out, "Output CSV ('-' for stdout)")
      ->capture_default_str();
  report_cmd->callback([&] { action = [&] { cmd_report(report_args, {out, err, g.quiet}); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  g.format = format_name == "csv" ? OutputFormat::Csv : OutputFormat::Table;
  try {
    action();
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace riverflow::cli
