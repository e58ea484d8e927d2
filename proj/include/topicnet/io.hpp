#pragma once

// On-disk formats.
//
// Dataset directory:
//   manifest.json   format_version, p, K, n, kind, topics_known, masked, observation_files,
//                   topics_file (optional), mask_files (when masked), seed_provenance (optional)
//   obs_NNNN.txt    one "row,col,value" record per nonzero, 0-indexed; '#' starts a comment
//   topics.txt      n lines of K values separated by spaces or commas
//   mask_NNNN.txt   "row,col,1" records of the author mask
//
// Model file: JSON with matrices stored as one string of space-separated values per row, every
// value written as its shortest round-trip decimal, so save/load is bit-exact.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "topicnet/baselines.hpp"
#include "topicnet/synthgen.hpp"
#include "topicnet/types.hpp"

namespace topicnet {

inline constexpr int kFormatVersion = 1;

struct DatasetManifest {
  int format_version = kFormatVersion;
  Eigen::Index p = 0;
  Eigen::Index K = 0;
  Eigen::Index n = 0;
  ObservationKind kind = ObservationKind::real;
  bool topics_known = false;
  bool masked = false;
  std::vector<std::string> observation_files;
  std::optional<std::string> topics_file;
  std::vector<std::optional<std::string>> mask_files;
  nlohmann::ordered_json seed_provenance;  ///< null when absent
};

/// Writes the directory (created if needed). Overwrites files of the same names.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                  const nlohmann::ordered_json& seed_provenance = nullptr);
Dataset load_dataset(const std::filesystem::path& dir);
DatasetManifest load_manifest(const std::filesystem::path& dir);

/// Triplet text for one matrix, and its parser. `origin` names the source in error messages.
std::string format_triplets(const Matrix& m);
Matrix parse_triplets(const std::string& text, Eigen::Index p, const std::string& origin);

std::string format_topic_rows(const Matrix& topics);
Matrix parse_topic_rows(const std::string& text, Eigen::Index n, Eigen::Index k,
                        const std::string& origin);

enum class ModelType { factors, one_matrix, k_matrices };

struct ModelFile {
  ModelType type = ModelType::factors;
  FactorPair factors;               ///< factors only
  std::optional<Matrix> mean;       ///< one_matrix only
  std::optional<ThetaStack> thetas; ///< k_matrices only
  std::optional<Matrix> topics;     ///< learned topic matrix, when fitted jointly
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  Eigen::Index nodes() const;
  Eigen::Index topic_count() const;
  Eigen::Index parameter_count() const;
};

ModelFile model_from_baseline(const BaselineModel& model);
BaselineModel baseline_from_model(const ModelFile& file);

std::string model_to_text(const ModelFile& model);
ModelFile model_from_text(const std::string& text, const std::string& origin = "model");
void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Ground-truth directory: factors.json (a factors model), topics.txt and spec.json.
struct GroundTruth {
  FactorPair factors;
  Matrix topics;
  std::optional<SynthSpec> spec;
};
void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& dir);
GroundTruth load_ground_truth(const std::filesystem::path& dir);

nlohmann::ordered_json spec_to_json(const SynthSpec& spec);
SynthSpec spec_from_json(const nlohmann::ordered_json& j);

/// Whole-file helpers; errors name the path.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace topicnet
