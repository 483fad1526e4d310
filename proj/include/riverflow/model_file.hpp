#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "riverflow/training.hpp"

namespace riverflow {

inline constexpr int kModelFormatVersion = 1;

/// On-disk form of a trained model: a JSON document. Doubles are written in
/// shortest round-trip decimal, so load followed by save is byte-identical.
struct ModelFile {
  int format_version = kModelFormatVersion;
  DischargeModel model;
  TrainingHyperparams hyperparams;
  Metrics metrics;
  std::size_t epoch_count = 0;
  std::string provenance;

  static ModelFile from_trained(const TrainedModel& trained, std::string provenance);

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

std::string serialize_model(const ModelFile& file);
/// Throws ParseError on malformed or unsupported documents and DomainError on
/// structurally invalid models.
ModelFile deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace riverflow
