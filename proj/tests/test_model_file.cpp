#include <doctest.h>

#include <filesystem>

#include "riverflow/errors.hpp"
#include "riverflow/model_file.hpp"
#include "synthetic.hpp"

using namespace riverflow;

namespace {

ModelFile sample_file() {
  TrainingHyperparams hp;
  hp.max_epochs = 300;
  hp.seed = 1234567890123ULL;
  const auto trained = train(riverflow::testing::synthetic_features(10, 2), 4, hp);
  return ModelFile::from_trained(trained, "features=x.csv; records=10");
}

}  // namespace

TEST_CASE("model file round trip") {
  const ModelFile f = sample_file();
  const std::string text = serialize_model(f);
  const ModelFile back = deserialize_model(text);
  CHECK(back == f);
  CHECK(serialize_model(back) == text);
  CHECK(text.find("\"format_version\": 1") != std::string::npos);
}

TEST_CASE("model file on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "riverflow_model_file_test";
  std::filesystem::create_directories(dir);
  const ModelFile f = sample_file();
  save_model(dir / "m.json", f);
  CHECK(load_model(dir / "m.json") == f);
  CHECK_THROWS_AS(load_model(dir / "missing.json"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model file rejects bad documents") {
  CHECK_THROWS_AS(deserialize_model("not json"), ParseError);
  CHECK_THROWS_AS(deserialize_model("{}"), ParseError);

  std::string text = serialize_model(sample_file());
  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("\"format_version\": 1"), 19, "\"format_version\": 9");
  CHECK_THROWS_AS(deserialize_model(wrong_version), ParseError);

  ModelFile f = sample_file();
  f.model.network.weights[0].data.pop_back();
  CHECK_THROWS_AS(deserialize_model(serialize_model(f)), DomainError);

  f = sample_file();
  f.model.scaler.column_maxs[1] = f.model.scaler.column_mins[1];
  CHECK_THROWS_AS(deserialize_model(serialize_model(f)), DomainError);
}
