#include "riverflow/model_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riverflow/errors.hpp"

namespace riverflow {

using nlohmann::json;

namespace {

json network_to_json(const Network& net) {
  json weights = json::array();
  json biases = json::array();
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    weights.push_back(net.weights[k].data);
    biases.push_back(net.biases[k]);
  }
  return {{"layer_sizes", net.layer_sizes},
          {"activation", "tanh"},
          {"weights", weights},
          {"biases", biases}};
}

Network network_from_json(const json& j) {
  Network net;
  net.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  if (j.at("activation").get<std::string>() != "tanh") {
    throw ParseError("unsupported activation '" + j.at("activation").get<std::string>() + "'");
  }
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  if (net.layer_sizes.size() < 2 || weights.size() != net.layer_sizes.size() - 1) {
    throw DomainError("weight matrix count does not match the layer sizes");
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    Matrix w;
    w.rows = net.layer_sizes[k + 1];
    w.cols = net.layer_sizes[k];
    w.data = weights[k].get<std::vector<double>>();
    net.weights.push_back(std::move(w));
  }
  for (const auto& b : biases) net.biases.push_back(b.get<std::vector<double>>());
  validate_network(net);
  return net;
}

}  // namespace

ModelFile ModelFile::from_trained(const TrainedModel& trained, std::string provenance) {
  ModelFile f;
  f.model = trained.model;
  f.hyperparams = trained.hyperparams;
  f.metrics = trained.training_metrics;
  f.epoch_count = trained.epoch_count;
  f.provenance = std::move(provenance);
  return f;
}

std::string serialize_model(const ModelFile& file) {
  const Scaler& s = file.model.scaler;
  const TrainingHyperparams& hp = file.hyperparams;
  json doc = {
      {"format_version", file.format_version},
      {"network", network_to_json(file.model.network)},
      {"scaler",
       {{"columns", {"swe_may1_in", "precip_mjj_in", "temp_mjj_r", "discharge_mjj_cfs"}},
        {"column_mins", s.column_mins},
        {"column_maxs", s.column_maxs},
        {"target_low", s.target_low},
        {"target_high", s.target_high}}},
      {"hyperparams",
       {{"learning_rate", hp.learning_rate},
        {"momentum_coefficient", hp.momentum_coefficient},
        {"max_epochs", hp.max_epochs},
        {"target_mse", hp.target_mse},
        {"seed", hp.seed}}},
      {"metrics",
       {{"mse", file.metrics.mse}, {"r", file.metrics.r}, {"pct_error", file.metrics.pct_error}}},
      {"epoch_count", file.epoch_count},
      {"provenance", file.provenance},
  };
  return doc.dump(2) + "\n";
}

ModelFile deserialize_model(const std::string& text) {
  try {
    const json doc = json::parse(text);
    ModelFile f;
    f.format_version = doc.at("format_version").get<int>();
    if (f.format_version != kModelFormatVersion) {
      throw ParseError("unsupported model format version " + std::to_string(f.format_version));
    }
    f.model.network = network_from_json(doc.at("network"));

    const auto& s = doc.at("scaler");
    f.model.scaler.column_mins = s.at("column_mins").get<std::vector<double>>();
    f.model.scaler.column_maxs = s.at("column_maxs").get<std::vector<double>>();
    f.model.scaler.target_low = s.at("target_low").get<double>();
    f.model.scaler.target_high = s.at("target_high").get<double>();

    const auto& hp = doc.at("hyperparams");
    f.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
    f.hyperparams.momentum_coefficient = hp.at("momentum_coefficient").get<double>();
    f.hyperparams.max_epochs = hp.at("max_epochs").get<std::size_t>();
    f.hyperparams.target_mse = hp.at("target_mse").get<double>();
    f.hyperparams.seed = hp.at("seed").get<std::uint64_t>();

    const auto& m = doc.at("metrics");
    f.metrics = {m.at("mse").get<double>(), m.at("r").get<double>(),
                 m.at("pct_error").get<double>()};
    f.epoch_count = doc.at("epoch_count").get<std::size_t>();
    f.provenance = doc.at("provenance").get<std::string>();

    validate_model(f.model);
    f.hyperparams.validate();
    return f;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << serialize_model(file);
  if (!out) throw IoError("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_model(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace riverflow
