#include "topicnet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "topicnet/errors.hpp"
#include "topicnet/text.hpp"

namespace topicnet {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, bool allow_spaces) {
  std::vector<std::string> out;
  std::string cur;
  bool pending = false;
  for (char c : line) {
    const bool sep = c == ',' || (allow_spaces && (c == ' ' || c == '\t'));
    if (sep) {
      if (!cur.empty() || c == ',') out.push_back(trim(cur));
      cur.clear();
      pending = c == ',';
    } else {
      cur.push_back(c);
      pending = false;
    }
  }
  if (!cur.empty() || pending) out.push_back(trim(cur));
  std::vector<std::string> cleaned;
  for (auto& f : out) {
    if (!(allow_spaces && f.empty())) cleaned.push_back(std::move(f));
  }
  return cleaned;
}

[[noreturn]] void fail_at(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Lines with comments stripped, paired with their 1-based line numbers; blank lines dropped.
std::vector<std::pair<std::size_t, std::string>> content_lines(const std::string& text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream is(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (!line.empty()) out.emplace_back(no, std::move(line));
  }
  return out;
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

template <class T>
T field(const Json& j, const char* key, const std::string& origin) {
  if (!j.contains(key)) throw ValidationError(origin + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(origin + ": field '" + key + "' has the wrong type");
  }
}

Json rows_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::string line;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line.push_back(' ');
      line += format_double(m(i, j));
    }
    rows.push_back(std::move(line));
  }
  return rows;
}

Matrix rows_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols,
                      const std::string& origin) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw DimensionError(origin + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    std::vector<double> values;
    if (row.is_string()) {
      for (const auto& f : split_fields(row.get<std::string>(), true)) {
        const auto v = parse_double(f);
        if (!v) throw ValidationError(origin + ": row " + std::to_string(i) + ": bad number '" + f + "'");
        values.push_back(*v);
      }
    } else if (row.is_array()) {
      for (const auto& v : row) {
        if (!v.is_number()) throw ValidationError(origin + ": row " + std::to_string(i) + ": non-numeric entry");
        values.push_back(v.get<double>());
      }
    } else {
      throw ValidationError(origin + ": row " + std::to_string(i) + " must be a string or array");
    }
    if (static_cast<Eigen::Index>(values.size()) != cols) {
      throw DimensionError(origin + ": row " + std::to_string(i) + " has " +
                           std::to_string(values.size()) + " values, expected " +
                           std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!std::isfinite(values[static_cast<std::size_t>(c)])) {
        throw ValidationError(origin + ": row " + std::to_string(i) + " has a non-finite value");
      }
      m(i, c) = values[static_cast<std::size_t>(c)];
    }
  }
  return m;
}

const char* model_type_name(ModelType t) {
  switch (t) {
    case ModelType::factors: return "factors";
    case ModelType::one_matrix: return "one-matrix";
    case ModelType::k_matrices: return "k-matrices";
  }
  return "factors";
}

ModelType parse_model_type(const std::string& s, const std::string& origin) {
  if (s == "factors") return ModelType::factors;
  if (s == "one-matrix") return ModelType::one_matrix;
  if (s == "k-matrices") return ModelType::k_matrices;
  throw ValidationError(origin + ": unknown model type '" + s + "'");
}

std::string observation_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "obs_%04zu.txt", i);
  return buf;
}

std::string mask_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "mask_%04zu.txt", i);
  return buf;
}

// Rejects names that would escape the dataset directory.
void check_relative(const std::string& name, const std::string& origin) {
  const fs::path p(name);
  if (name.empty() || p.is_absolute()) {
    throw ValidationError(origin + ": file name '" + name + "' must be a relative path");
  }
  for (const auto& part : p) {
    if (part == "..") throw ValidationError(origin + ": file name '" + name + "' leaves the directory");
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(path.string() + ": cannot write file");
  out << text;
  if (!out) throw ValidationError(path.string() + ": write failed");
}

std::string format_triplets(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v == 0.0) continue;
      out += std::to_string(i);
      out.push_back(',');
      out += std::to_string(j);
      out.push_back(',');
      out += format_double(v);
      out.push_back('\n');
    }
  }
  return out;
}

Matrix parse_triplets(const std::string& text, Eigen::Index p, const std::string& origin) {
  Matrix m = Matrix::Zero(p, p);
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& [no, line] : content_lines(text)) {
    const auto f = split_fields(line, false);
    if (f.size() != 3) fail_at(origin, no, "expected 'row,col,value'");
    const auto r = parse_int(f[0]);
    const auto c = parse_int(f[1]);
    const auto v = parse_double(f[2]);
    if (!r || !c) fail_at(origin, no, "row and column must be integers");
    if (!v) fail_at(origin, no, "bad value '" + f[2] + "'");
    if (*r < 0 || *r >= p || *c < 0 || *c >= p) {
      fail_at(origin, no, "index (" + f[0] + "," + f[1] + ") outside [0, " + std::to_string(p) + ")");
    }
    if (!std::isfinite(*v)) fail_at(origin, no, "non-finite value");
    if (!seen.emplace(*r, *c).second) fail_at(origin, no, "duplicate entry (" + f[0] + "," + f[1] + ")");
    m(*r, *c) = *v;
  }
  return m;
}

std::string format_topic_rows(const Matrix& topics) {
  std::string out;
  for (Eigen::Index i = 0; i < topics.rows(); ++i) {
    for (Eigen::Index k = 0; k < topics.cols(); ++k) {
      if (k > 0) out.push_back(' ');
      out += format_double(topics(i, k));
    }
    out.push_back('\n');
  }
  return out;
}

Matrix parse_topic_rows(const std::string& text, Eigen::Index n, Eigen::Index k,
                        const std::string& origin) {
  const auto lines = content_lines(text);
  if (static_cast<Eigen::Index>(lines.size()) != n) {
    throw ValidationError(origin + ": expected " + std::to_string(n) + " topic rows, found " +
                          std::to_string(lines.size()));
  }
  Matrix m(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [no, line] = lines[static_cast<std::size_t>(i)];
    const auto f = split_fields(line, true);
    if (static_cast<Eigen::Index>(f.size()) != k) {
      fail_at(origin, no, "expected " + std::to_string(k) + " values, found " + std::to_string(f.size()));
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      const auto v = parse_double(f[static_cast<std::size_t>(c)]);
      if (!v || !std::isfinite(*v)) fail_at(origin, no, "bad value '" + f[static_cast<std::size_t>(c)] + "'");
      m(i, c) = *v;
    }
    try {
      validate_topic_distribution(m.row(i).transpose());
    } catch (const ValidationError& e) {
      fail_at(origin, no, e.what());
    }
  }
  return m;
}

void save_dataset(const Dataset& ds, const fs::path& dir, const Json& provenance) {
  validate_dataset(ds);
  fs::create_directories(dir);
  Json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["p"] = ds.nodes;
  manifest["K"] = ds.topics;
  manifest["n"] = ds.size();
  const bool binary =
      !ds.observations.empty() && ds.observations.front().kind == ObservationKind::binary;
  manifest["kind"] = binary ? "binary" : "real";
  manifest["topics_known"] = ds.topics_known;
  manifest["masked"] = ds.masked();
  Json files = Json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    files.push_back(observation_name(i));
    write_text(dir / observation_name(i), format_triplets(ds.observations[i].values));
  }
  manifest["observation_files"] = files;
  if (ds.topics_known) {
    manifest["topics_file"] = "topics.txt";
    write_text(dir / "topics.txt", format_topic_rows(ds.topic_matrix()));
  } else {
    manifest["topics_file"] = nullptr;
  }
  if (ds.masked()) {
    Json masks = Json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!ds.observations[i].mask) {
        masks.push_back(nullptr);
        continue;
      }
      masks.push_back(mask_name(i));
      write_text(dir / mask_name(i), format_triplets(*ds.observations[i].mask));
    }
    manifest["mask_files"] = masks;
  }
  manifest["seed_provenance"] = provenance;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

DatasetManifest load_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  const std::string origin = path.string();
  const Json j = parse_json(read_text(path), origin);
  if (!j.is_object()) throw ValidationError(origin + ": manifest must be a JSON object");
  DatasetManifest m;
  m.format_version = field<int>(j, "format_version", origin);
  if (m.format_version != kFormatVersion) {
    throw ValidationError(origin + ": unsupported format_version " + std::to_string(m.format_version));
  }
  m.p = field<Eigen::Index>(j, "p", origin);
  m.K = field<Eigen::Index>(j, "K", origin);
  m.n = field<Eigen::Index>(j, "n", origin);
  if (m.p < 1 || m.K < 1 || m.n < 0) throw ValidationError(origin + ": p and K must be positive, n nonnegative");
  const auto kind = field<std::string>(j, "kind", origin);
  if (kind == "real") {
    m.kind = ObservationKind::real;
  } else if (kind == "binary") {
    m.kind = ObservationKind::binary;
  } else {
    throw ValidationError(origin + ": kind must be 'real' or 'binary'");
  }
  m.topics_known = field<bool>(j, "topics_known", origin);
  m.masked = j.contains("masked") ? field<bool>(j, "masked", origin) : false;
  m.observation_files = field<std::vector<std::string>>(j, "observation_files", origin);
  if (static_cast<Eigen::Index>(m.observation_files.size()) != m.n) {
    throw ValidationError(origin + ": n = " + std::to_string(m.n) + " but " +
                          std::to_string(m.observation_files.size()) + " observation files listed");
  }
  for (const auto& f : m.observation_files) check_relative(f, origin);
  if (j.contains("topics_file") && !j["topics_file"].is_null()) {
    m.topics_file = field<std::string>(j, "topics_file", origin);
    check_relative(*m.topics_file, origin);
  }
  if (m.topics_known && !m.topics_file) {
    throw ValidationError(origin + ": topics_known is true but no topics_file is given");
  }
  if (m.masked) {
    if (!j.contains("mask_files") || !j["mask_files"].is_array()) {
      throw ValidationError(origin + ": masked dataset needs a mask_files list");
    }
    for (const auto& e : j["mask_files"]) {
      if (e.is_null()) {
        m.mask_files.emplace_back();
      } else if (e.is_string()) {
        check_relative(e.get<std::string>(), origin);
        m.mask_files.emplace_back(e.get<std::string>());
      } else {
        throw ValidationError(origin + ": mask_files entries must be strings or null");
      }
    }
    if (static_cast<Eigen::Index>(m.mask_files.size()) != m.n) {
      throw ValidationError(origin + ": mask_files must list one entry per observation");
    }
  }
  if (j.contains("seed_provenance")) m.seed_provenance = j["seed_provenance"];
  for (const auto& f : m.observation_files) {
    if (!fs::exists(dir / f)) throw ValidationError(origin + ": observation file '" + f + "' does not exist");
  }
  return m;
}

Dataset load_dataset(const fs::path& dir) {
  const DatasetManifest m = load_manifest(dir);
  Dataset ds;
  ds.nodes = m.p;
  ds.topics = m.K;
  ds.topics_known = m.topics_known;
  for (std::size_t i = 0; i < m.observation_files.size(); ++i) {
    const fs::path path = dir / m.observation_files[i];
    Observation obs;
    obs.kind = m.kind;
    obs.values = parse_triplets(read_text(path), m.p, path.string());
    if (m.kind == ObservationKind::binary) {
      try {
        validate_binary(obs.values, "values");
      } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
      }
    }
    if (m.masked && m.mask_files[i]) {
      const fs::path mpath = dir / *m.mask_files[i];
      obs.mask = parse_triplets(read_text(mpath), m.p, mpath.string());
      try {
        validate_binary(*obs.mask, "mask");
      } catch (const ValidationError& e) {
        throw ValidationError(mpath.string() + ": " + e.what());
      }
    }
    ds.observations.push_back(std::move(obs));
  }
  if (m.topics_file) {
    const fs::path path = dir / *m.topics_file;
    const Matrix topics = parse_topic_rows(read_text(path), m.n, m.K, path.string());
    for (Eigen::Index i = 0; i < m.n; ++i) {
      ds.observations[static_cast<std::size_t>(i)].topics = topics.row(i).transpose();
    }
    ds.topics_known = true;
  }
  validate_dataset(ds);
  return ds;
}

Eigen::Index ModelFile::nodes() const {
  switch (type) {
    case ModelType::factors: return factors.nodes();
    case ModelType::one_matrix: return mean ? mean->rows() : 0;
    case ModelType::k_matrices: return thetas && !thetas->empty() ? thetas->front().rows() : 0;
  }
  return 0;
}

Eigen::Index ModelFile::topic_count() const {
  switch (type) {
    case ModelType::factors: return factors.topics();
    case ModelType::one_matrix: return topics ? topics->cols() : 1;
    case ModelType::k_matrices: return thetas ? static_cast<Eigen::Index>(thetas->size()) : 0;
  }
  return 0;
}

Eigen::Index ModelFile::parameter_count() const {
  switch (type) {
    case ModelType::factors: return factor_parameter_count(nodes(), topic_count());
    case ModelType::one_matrix: return topicnet::parameter_count(BaselineVariant::one_matrix, nodes(), 1);
    case ModelType::k_matrices:
      return topicnet::parameter_count(BaselineVariant::k_matrices, nodes(), topic_count());
  }
  return 0;
}

ModelFile model_from_baseline(const BaselineModel& b) {
  ModelFile f;
  f.type = b.variant == BaselineVariant::one_matrix ? ModelType::one_matrix : ModelType::k_matrices;
  f.mean = b.mean;
  f.thetas = b.thetas;
  f.topics = b.topics;
  return f;
}

BaselineModel baseline_from_model(const ModelFile& f) {
  if (f.type == ModelType::factors) throw ValidationError("model is not a baseline model");
  BaselineModel b;
  b.variant = f.type == ModelType::one_matrix ? BaselineVariant::one_matrix
                                              : BaselineVariant::k_matrices;
  b.mean = f.mean;
  b.thetas = f.thetas;
  b.topics = f.topics;
  return b;
}

std::string model_to_text(const ModelFile& m) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["type"] = model_type_name(m.type);
  j["p"] = m.nodes();
  j["K"] = m.topic_count();
  j["parameter_count"] = m.parameter_count();
  j["metadata"] = m.metadata;
  switch (m.type) {
    case ModelType::factors:
      j["influence"] = rows_to_json(m.factors.influence);
      j["receptivity"] = rows_to_json(m.factors.receptivity);
      break;
    case ModelType::one_matrix:
      if (!m.mean) throw ValidationError("one-matrix model has no mean matrix");
      j["mean"] = rows_to_json(*m.mean);
      break;
    case ModelType::k_matrices: {
      if (!m.thetas) throw ValidationError("k-matrices model has no theta matrices");
      Json stack = Json::array();
      for (const auto& t : *m.thetas) stack.push_back(rows_to_json(t));
      j["thetas"] = std::move(stack);
      break;
    }
  }
  if (m.topics) {
    j["n"] = m.topics->rows();
    j["topics"] = rows_to_json(*m.topics);
  }
  return j.dump(2) + "\n";
}

ModelFile model_from_text(const std::string& text, const std::string& origin) {
  const Json j = parse_json(text, origin);
  if (!j.is_object()) throw ValidationError(origin + ": model must be a JSON object");
  ModelFile m;
  if (j.contains("format_version") && field<int>(j, "format_version", origin) != kFormatVersion) {
    throw ValidationError(origin + ": unsupported format_version");
  }
  m.type = j.contains("type") ? parse_model_type(field<std::string>(j, "type", origin), origin)
                              : ModelType::factors;
  const auto p = field<Eigen::Index>(j, "p", origin);
  const auto k = field<Eigen::Index>(j, "K", origin);
  if (p < 1 || k < 1) throw ValidationError(origin + ": p and K must be positive");
  if (j.contains("metadata")) m.metadata = j["metadata"];
  switch (m.type) {
    case ModelType::factors:
      if (!j.contains("influence") || !j.contains("receptivity")) {
        throw ValidationError(origin + ": factors model needs influence and receptivity");
      }
      m.factors.influence = rows_from_json(j["influence"], p, k, origin + " influence");
      m.factors.receptivity = rows_from_json(j["receptivity"], p, k, origin + " receptivity");
      break;
    case ModelType::one_matrix:
      if (!j.contains("mean")) throw ValidationError(origin + ": one-matrix model needs 'mean'");
      m.mean = rows_from_json(j["mean"], p, p, origin + " mean");
      break;
    case ModelType::k_matrices: {
      if (!j.contains("thetas") || !j["thetas"].is_array() ||
          static_cast<Eigen::Index>(j["thetas"].size()) != k) {
        throw DimensionError(origin + ": k-matrices model needs K theta matrices");
      }
      ThetaStack stack;
      for (std::size_t c = 0; c < j["thetas"].size(); ++c) {
        stack.push_back(rows_from_json(j["thetas"][c], p, p, origin + " theta " + std::to_string(c)));
      }
      m.thetas = std::move(stack);
      break;
    }
  }
  if (j.contains("topics") && !j["topics"].is_null()) {
    const auto n = field<Eigen::Index>(j, "n", origin);
    m.topics = rows_from_json(j["topics"], n, k, origin + " topics");
    validate_topic_matrix(*m.topics);
  }
  return m;
}

void save_model(const ModelFile& m, const fs::path& path) { write_text(path, model_to_text(m)); }

ModelFile load_model(const fs::path& path) {
  return model_from_text(read_text(path), path.string());
}

Json spec_to_json(const SynthSpec& s) {
  Json j;
  j["p"] = s.p;
  j["K"] = s.K;
  j["n"] = s.n;
  j["topics_per_row"] = {s.topics_per_row.lo, s.topics_per_row.hi};
  j["value_range"] = {s.value_range.lo, s.value_range.hi};
  j["topics_per_obs"] = {s.topics_per_obs.lo, s.topics_per_obs.hi};
  j["obs_value_range"] = {s.obs_value_range.lo, s.obs_value_range.hi};
  j["miss_frac"] = s.miss_frac;
  j["noise_mult_range"] = {s.noise_mult_range.lo, s.noise_mult_range.hi};
  j["false_pos_frac"] = s.false_pos_frac;
  j["false_pos_range"] = {s.false_pos_range.lo, s.false_pos_range.hi};
  j["kind"] = s.kind == ObservationKind::real ? "real" : "binary";
  j["noise"] = s.noise == NoiseModel::protocol ? "protocol" : "gaussian";
  j["gaussian_sigma"] = s.gaussian_sigma;
  j["share_topics"] = s.share_topics;
  j["mask_rows"] = s.mask_rows;
  j["seed"] = s.seed;
  return j;
}

SynthSpec spec_from_json(const Json& j) {
  const std::string origin = "spec";
  SynthSpec s;
  try {
    s.p = j.at("p").get<Eigen::Index>();
    s.K = j.at("K").get<Eigen::Index>();
    s.n = j.at("n").get<Eigen::Index>();
    s.topics_per_row = {j.at("topics_per_row")[0].get<int>(), j.at("topics_per_row")[1].get<int>()};
    s.value_range = {j.at("value_range")[0].get<double>(), j.at("value_range")[1].get<double>()};
    s.topics_per_obs = {j.at("topics_per_obs")[0].get<int>(), j.at("topics_per_obs")[1].get<int>()};
    s.obs_value_range = {j.at("obs_value_range")[0].get<double>(),
                         j.at("obs_value_range")[1].get<double>()};
    s.miss_frac = j.at("miss_frac").get<double>();
    s.noise_mult_range = {j.at("noise_mult_range")[0].get<double>(),
                          j.at("noise_mult_range")[1].get<double>()};
    s.false_pos_frac = j.at("false_pos_frac").get<double>();
    s.false_pos_range = {j.at("false_pos_range")[0].get<double>(),
                         j.at("false_pos_range")[1].get<double>()};
    s.kind = j.at("kind").get<std::string>() == "binary" ? ObservationKind::binary
                                                          : ObservationKind::real;
    s.noise = j.at("noise").get<std::string>() == "gaussian" ? NoiseModel::gaussian
                                                             : NoiseModel::protocol;
    s.gaussian_sigma = j.at("gaussian_sigma").get<double>();
    s.share_topics = j.at("share_topics").get<bool>();
    s.mask_rows = j.at("mask_rows").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  validate_spec(s);
  return s;
}

void save_ground_truth(const GroundTruth& t, const fs::path& dir) {
  fs::create_directories(dir);
  ModelFile m;
  m.type = ModelType::factors;
  m.factors = t.factors;
  save_model(m, dir / "factors.json");
  write_text(dir / "topics.txt", format_topic_rows(t.topics));
  if (t.spec) write_text(dir / "spec.json", spec_to_json(*t.spec).dump(2) + "\n");
}

GroundTruth load_ground_truth(const fs::path& dir) {
  GroundTruth t;
  const ModelFile m = load_model(dir / "factors.json");
  if (m.type != ModelType::factors) {
    throw ValidationError((dir / "factors.json").string() + ": ground truth must be a factors model");
  }
  t.factors = m.factors;
  const fs::path topics = dir / "topics.txt";
  const std::string text = read_text(topics);
  const auto rows = static_cast<Eigen::Index>(content_lines(text).size());
  t.topics = parse_topic_rows(text, rows, t.factors.topics(), topics.string());
  if (fs::exists(dir / "spec.json")) {
    t.spec = spec_from_json(parse_json(read_text(dir / "spec.json"), (dir / "spec.json").string()));
  }
  return t;
}

}  // namespace topicnet
