#include "topicnet/types.hpp"

#include <cmath>
#include <string>

#include "topicnet/errors.hpp"

namespace topicnet {

bool Dataset::masked() const {
  for (const auto& obs : observations) {
    if (obs.mask) return true;
  }
  return false;
}

Matrix Dataset::topic_matrix() const {
  if (!topics_known) throw ValidationError("dataset has no known topic distributions");
  Matrix out(static_cast<Eigen::Index>(observations.size()), topics);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& t = observations[i].topics;
    if (!t || t->size() != topics) {
      throw ValidationError("observation " + std::to_string(i) + " is missing its topic row");
    }
    out.row(static_cast<Eigen::Index>(i)) = t->transpose();
  }
  return out;
}

void Dataset::set_topics(const Matrix& m) {
  if (m.rows() != static_cast<Eigen::Index>(observations.size())) {
    throw DimensionError("topic matrix has " + std::to_string(m.rows()) + " rows for " +
                         std::to_string(observations.size()) + " observations");
  }
  topics = m.cols();
  for (std::size_t i = 0; i < observations.size(); ++i) {
    observations[i].topics = m.row(static_cast<Eigen::Index>(i)).transpose();
  }
  topics_known = true;
}

void validate_topic_distribution(const Vector& m) {
  if (m.size() == 0) throw ValidationError("empty topic distribution");
  if (!m.allFinite()) throw ValidationError("topic distribution has non-finite entries");
  if ((m.array() < 0.0).any()) throw ValidationError("topic distribution has negative entries");
  if (std::abs(m.sum() - 1.0) > kSimplexTolerance) {
    throw ValidationError("topic distribution sums to " + std::to_string(m.sum()) + ", not 1");
  }
}

void validate_topic_matrix(const Matrix& topics) {
  for (Eigen::Index i = 0; i < topics.rows(); ++i) {
    try {
      validate_topic_distribution(topics.row(i).transpose());
    } catch (const ValidationError& e) {
      throw ValidationError("topic row " + std::to_string(i) + ": " + e.what());
    }
  }
}

void validate_binary(const Matrix& values, const char* what) {
  const bool ok = ((values.array() == 0.0) || (values.array() == 1.0)).all();
  if (!ok) throw ValidationError(std::string(what) + " must contain only 0 and 1");
}

void validate_dataset(const Dataset& ds) {
  if (ds.nodes < 1) throw ValidationError("dataset must have at least one node");
  for (std::size_t i = 0; i < ds.observations.size(); ++i) {
    const auto& obs = ds.observations[i];
    const std::string where = "observation " + std::to_string(i);
    if (obs.values.rows() != ds.nodes || obs.values.cols() != ds.nodes) {
      throw DimensionError(where + " is not " + std::to_string(ds.nodes) + "x" +
                           std::to_string(ds.nodes));
    }
    if (!obs.values.allFinite()) throw ValidationError(where + " has non-finite entries");
    if (obs.kind == ObservationKind::binary) validate_binary(obs.values, where.c_str());
    if (obs.mask) {
      if (obs.mask->rows() != ds.nodes || obs.mask->cols() != ds.nodes) {
        throw DimensionError(where + " mask has the wrong shape");
      }
      validate_binary(*obs.mask, (where + " mask").c_str());
    }
    if (ds.topics_known) {
      if (!obs.topics) throw ValidationError(where + " is missing its topic distribution");
      if (obs.topics->size() != ds.topics) throw DimensionError(where + " topic vector length");
      try {
        validate_topic_distribution(*obs.topics);
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }
}

ThetaStack thetas_from_factors(const FactorPair& f) {
  ThetaStack out;
  out.reserve(static_cast<std::size_t>(f.topics()));
  for (Eigen::Index k = 0; k < f.topics(); ++k) {
    out.emplace_back(f.influence.col(k) * f.receptivity.col(k).transpose());
  }
  return out;
}

Eigen::Index count_nonzeros(const Matrix& m) { return (m.array() != 0.0).count(); }

}  // namespace topicnet
