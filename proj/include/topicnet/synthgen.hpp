#pragma once

#include <cstdint>
#include <vector>

#include "topicnet/rng.hpp"
#include "topicnet/types.hpp"

namespace topicnet {

/// How observations are corrupted.
///  - protocol: missed edges, multiplicative noise and false positives (binary: Bernoulli
///    sampling plus false positives), following the standard simulation recipe.
///  - gaussian: additive zero-mean N(0, σ²) noise on every entry, real kind only.
enum class NoiseModel { protocol, gaussian };

struct IntRange {
  int lo = 1;
  int hi = 1;
};

struct RealRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct SynthSpec {
  Eigen::Index p = 200;
  Eigen::Index K = 10;
  Eigen::Index n = 50;
  IntRange topics_per_row{1, 3};
  RealRange value_range{1.0, 2.0};
  IntRange topics_per_obs{1, 3};
  RealRange obs_value_range{0.0, 1.0};
  double miss_frac = 0.10;
  RealRange noise_mult_range{0.3, 3.0};
  double false_pos_frac = 0.10;
  RealRange false_pos_range{0.0, 1.0};
  ObservationKind kind = ObservationKind::real;
  NoiseModel noise = NoiseModel::protocol;
  double gaussian_sigma = 0.0;
  bool share_topics = false;   ///< B2 rows reuse the topic columns drawn for B1 rows
  int mask_rows = 0;           ///< author rows kept per observation; 0 = no masks
  std::uint64_t seed = 0;
};

void validate_spec(const SynthSpec& spec);

struct SynthInstance {
  FactorPair truth;
  Matrix topics;               ///< n×K
  std::vector<Matrix> clean;   ///< X*_i, masked when masks are generated
  Dataset dataset;             ///< noisy observations, topics attached
  SynthSpec spec;
  std::uint64_t observation_stream = 0;

  /// E_i = X_i − X*_i.
  std::vector<Matrix> errors() const;
};

/// Stream indices under the master seed.
inline constexpr std::uint64_t kTruthStream = 0;
inline constexpr std::uint64_t kTrainStream = 1;
inline constexpr std::uint64_t kTestStream = 2;

/// Rows of B1 first, then rows of B2. Each row gets a uniformly drawn number of distinct topic
/// columns with values from spec.value_range.
FactorPair gen_ground_truth(const SynthSpec& spec, Rng& rng);
FactorPair gen_ground_truth(const SynthSpec& spec);

/// n rows, each with a drawn number of topics weighted by spec.obs_value_range and normalized.
Matrix gen_topics(const SynthSpec& spec, Rng& rng);

/// Exact-count missed edges, multiplicative noise on survivors, exact-count false positives
/// among the structural zeros of `clean`.
Matrix gen_observation_real(const Matrix& clean, const SynthSpec& spec, Rng& rng);

/// Bernoulli(min(clean, 1)) per nonzero entry, then exact-count false positives among the
/// structural zeros of `clean`.
Matrix gen_observation_binary(const Matrix& clean, const SynthSpec& spec, Rng& rng);

/// Row mask with `rows` author rows set to one.
Matrix gen_author_mask(Eigen::Index p, int rows, Rng& rng);

/// Ground truth from the truth stream and n observations from the training stream.
SynthInstance gen_instance(const SynthSpec& spec);

/// Fresh topics, masks and noise for `n` observations of an existing ground truth, drawn from
/// stream `stream` under spec.seed.
SynthInstance gen_split(const SynthSpec& spec, const FactorPair& truth, Eigen::Index n,
                        std::uint64_t stream);

}  // namespace topicnet
