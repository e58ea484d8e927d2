#include "topicnet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topicnet/errors.hpp"
#include "topicnet/model.hpp"

namespace topicnet {
namespace {

void check_range(const IntRange& r, const char* what) {
  if (r.lo < 1 || r.hi < r.lo) throw ValidationError(std::string(what) + ": invalid range");
}

void check_range(const RealRange& r, const char* what) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw ValidationError(std::string(what) + ": invalid range");
  }
}

void check_fraction(double f, const char* what) {
  if (!(f >= 0.0 && f <= 1.0)) throw ValidationError(std::string(what) + " must lie in [0, 1]");
}

// Distinct topic columns for one row; the count is clipped to K.
std::vector<std::size_t> draw_topic_columns(const IntRange& range, Eigen::Index k, Rng& rng) {
  const auto hi = std::min<std::int64_t>(range.hi, k);
  const auto lo = std::min<std::int64_t>(range.lo, hi);
  const auto count = static_cast<std::size_t>(rng.uniform_int(lo, hi));
  return rng.sample_without_replacement(static_cast<std::size_t>(k), count);
}

std::size_t exact_count(double fraction, std::size_t population) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(population)));
}

}  // namespace

void validate_spec(const SynthSpec& s) {
  if (s.p < 1 || s.K < 1 || s.n < 1) throw ValidationError("p, K and n must be at least 1");
  check_range(s.topics_per_row, "topics_per_row");
  check_range(s.topics_per_obs, "topics_per_obs");
  check_range(s.value_range, "value_range");
  check_range(s.obs_value_range, "obs_value_range");
  check_range(s.noise_mult_range, "noise_mult_range");
  check_range(s.false_pos_range, "false_pos_range");
  check_fraction(s.miss_frac, "miss_frac");
  check_fraction(s.false_pos_frac, "false_pos_frac");
  if (s.obs_value_range.hi <= 0.0) throw ValidationError("obs_value_range must allow positive weights");
  if (s.noise == NoiseModel::gaussian && s.kind == ObservationKind::binary) {
    throw ValidationError("gaussian noise applies to real-valued observations only");
  }
  if (!(s.gaussian_sigma >= 0.0)) throw ValidationError("gaussian_sigma must be nonnegative");
  if (s.mask_rows < 0 || s.mask_rows > s.p) throw ValidationError("mask_rows outside [0, p]");
}

std::vector<Matrix> SynthInstance::errors() const {
  std::vector<Matrix> out;
  out.reserve(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    out.push_back(dataset.observations[i].values - clean[i]);
  }
  return out;
}

FactorPair gen_ground_truth(const SynthSpec& spec, Rng& rng) {
  FactorPair f = FactorPair::zeros(spec.p, spec.K);
  std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(spec.p));
  for (Eigen::Index j = 0; j < spec.p; ++j) {
    auto cols = draw_topic_columns(spec.topics_per_row, spec.K, rng);
    for (auto c : cols) {
      f.influence(j, static_cast<Eigen::Index>(c)) =
          rng.uniform(spec.value_range.lo, spec.value_range.hi);
    }
    rows[static_cast<std::size_t>(j)] = std::move(cols);
  }
  for (Eigen::Index j = 0; j < spec.p; ++j) {
    const auto cols = spec.share_topics ? rows[static_cast<std::size_t>(j)]
                                        : draw_topic_columns(spec.topics_per_row, spec.K, rng);
    for (auto c : cols) {
      f.receptivity(j, static_cast<Eigen::Index>(c)) =
          rng.uniform(spec.value_range.lo, spec.value_range.hi);
    }
  }
  return f;
}

FactorPair gen_ground_truth(const SynthSpec& spec) {
  validate_spec(spec);
  Rng rng(derive_seed(spec.seed, kTruthStream));
  return gen_ground_truth(spec, rng);
}

Matrix gen_topics(const SynthSpec& spec, Rng& rng) {
  Matrix m = Matrix::Zero(spec.n, spec.K);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (;;) {
      const auto cols = draw_topic_columns(spec.topics_per_obs, spec.K, rng);
      Vector row = Vector::Zero(spec.K);
      for (auto c : cols) {
        row(static_cast<Eigen::Index>(c)) =
            rng.uniform(spec.obs_value_range.lo, spec.obs_value_range.hi);
      }
      const double total = row.sum();
      if (total > 0.0) {
        m.row(i) = (row / total).transpose();
        break;
      }
    }
  }
  return m;
}

Matrix gen_observation_real(const Matrix& clean, const SynthSpec& spec, Rng& rng) {
  Matrix x = clean;
  if (spec.noise == NoiseModel::gaussian) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += spec.gaussian_sigma * rng.normal();
    return x;
  }
  std::vector<Eigen::Index> nonzero;
  std::vector<Eigen::Index> zero;
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    (clean.data()[i] != 0.0 ? nonzero : zero).push_back(i);
  }
  const auto missed = rng.sample_without_replacement(nonzero.size(),
                                                     exact_count(spec.miss_frac, nonzero.size()));
  for (auto idx : missed) x.data()[nonzero[idx]] = 0.0;
  for (auto i : nonzero) {
    if (x.data()[i] == 0.0) continue;
    x.data()[i] *= rng.uniform(spec.noise_mult_range.lo, spec.noise_mult_range.hi);
  }
  const auto spurious =
      rng.sample_without_replacement(zero.size(), exact_count(spec.false_pos_frac, zero.size()));
  for (auto idx : spurious) {
    x.data()[zero[idx]] = rng.uniform(spec.false_pos_range.lo, spec.false_pos_range.hi);
  }
  return x;
}

Matrix gen_observation_binary(const Matrix& clean, const SynthSpec& spec, Rng& rng) {
  Matrix x = Matrix::Zero(clean.rows(), clean.cols());
  std::vector<Eigen::Index> zero;
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    const double v = clean.data()[i];
    if (v > 0.0) {
      x.data()[i] = rng.bernoulli(std::min(v, 1.0)) ? 1.0 : 0.0;
    } else {
      zero.push_back(i);
    }
  }
  const auto spurious =
      rng.sample_without_replacement(zero.size(), exact_count(spec.false_pos_frac, zero.size()));
  for (auto idx : spurious) x.data()[zero[idx]] = 1.0;
  return x;
}

Matrix gen_author_mask(Eigen::Index p, int rows, Rng& rng) {
  Matrix mask = Matrix::Zero(p, p);
  for (auto r : rng.sample_without_replacement(static_cast<std::size_t>(p),
                                               static_cast<std::size_t>(rows))) {
    mask.row(static_cast<Eigen::Index>(r)).setOnes();
  }
  return mask;
}

SynthInstance gen_split(const SynthSpec& spec_in, const FactorPair& truth, Eigen::Index n,
                        std::uint64_t stream) {
  SynthSpec spec = spec_in;
  spec.n = n;
  validate_spec(spec);
  if (truth.nodes() != spec.p || truth.topics() != spec.K) {
    throw DimensionError("ground truth does not match the spec dimensions");
  }
  Rng rng(derive_seed(spec.seed, stream));
  SynthInstance inst;
  inst.spec = spec;
  inst.truth = truth;
  inst.observation_stream = stream;
  inst.topics = gen_topics(spec, rng);

  std::vector<Matrix> masks;
  if (spec.mask_rows > 0) {
    for (Eigen::Index i = 0; i < n; ++i) masks.push_back(gen_author_mask(spec.p, spec.mask_rows, rng));
  }

  inst.dataset.nodes = spec.p;
  inst.dataset.topics = spec.K;
  inst.dataset.topics_known = true;
  inst.dataset.observations.reserve(static_cast<std::size_t>(n));
  inst.clean.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector m = inst.topics.row(i).transpose();
    Matrix clean = forward(truth, m);
    if (!masks.empty()) clean.array() *= masks[static_cast<std::size_t>(i)].array();
    Observation obs;
    obs.kind = spec.kind;
    obs.values = spec.kind == ObservationKind::real ? gen_observation_real(clean, spec, rng)
                                                    : gen_observation_binary(clean, spec, rng);
    if (!masks.empty()) {
      obs.values.array() *= masks[static_cast<std::size_t>(i)].array();
      obs.mask = masks[static_cast<std::size_t>(i)];
    }
    obs.topics = m;
    inst.dataset.observations.push_back(std::move(obs));
    inst.clean.push_back(std::move(clean));
  }
  return inst;
}

SynthInstance gen_instance(const SynthSpec& spec) {
  return gen_split(spec, gen_ground_truth(spec), spec.n, kTrainStream);
}

}  // namespace topicnet
