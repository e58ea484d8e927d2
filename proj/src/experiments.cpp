#include "topicnet/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "topicnet/errors.hpp"
#include "topicnet/model.hpp"
#include "topicnet/objective.hpp"
#include "topicnet/text.hpp"

namespace topicnet {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string kind_name(ObservationKind k) { return k == ObservationKind::real ? "real" : "binary"; }

struct Split {
  FactorPair truth;
  SynthInstance train;
  SynthInstance test;
};

// Test observations for every n are prefixes of one pool, so larger n never sees a different
// test sample.
Split make_split(const NsweepConfig& cfg, Eigen::Index n, std::uint64_t seed) {
  SynthSpec spec = cfg.spec;
  spec.n = n;
  spec.seed = seed;
  Split s;
  s.truth = gen_ground_truth(spec);
  s.train = gen_split(spec, s.truth, n, kTrainStream);
  const Eigen::Index largest = *std::max_element(cfg.n_values.begin(), cfg.n_values.end());
  const Eigen::Index pool = std::max({cfg.min_test, n, largest});
  const Eigen::Index size = std::max(cfg.min_test, n);
  s.test = gen_split(spec, s.truth, pool, kTestStream);
  s.test.topics.conservativeResize(size, Eigen::NoChange);
  s.test.clean.resize(static_cast<std::size_t>(size));
  s.test.dataset.observations.resize(static_cast<std::size_t>(size));
  s.test.spec.n = size;
  return s;
}

struct Scores {
  double train = 0.0;
  double test = 0.0;
};

Scores score_factors(const NsweepConfig& cfg, const Split& s) {
  const Dataset& train = s.train.dataset;
  const Dataset& test = s.test.dataset;
  if (cfg.known_topics) {
    FitConfig fit = cfg.fit;
    if (fit.sparsity == 0) fit.sparsity = sparsity_from_truth(s.truth);
    const KnownFit f = fit_known(train, s.train.topics, fit);
    return {prediction_error(predict_dataset(f.factors, train, s.train.topics), train),
            prediction_error(predict_dataset(f.factors, test, s.test.topics), test)};
  }
  JointConfig joint = cfg.joint;
  if (joint.inner.sparsity == 0) joint.inner.sparsity = sparsity_from_truth(s.truth);
  const JointFit f = fit_joint(train, cfg.spec.K, joint);
  const Matrix test_topics = infer_topics(f.factors, test, joint.mstep_iters, joint.mstep_tol);
  return {prediction_error(predict_dataset(f.factors, train, f.topics), train),
          prediction_error(predict_dataset(f.factors, test, test_topics), test)};
}

Scores score_one_matrix(const NsweepConfig& cfg, const Split& s) {
  const Eigen::Index threshold =
      cfg.baseline_threshold != 0 ? cfg.baseline_threshold : default_baseline_threshold(cfg.spec.p);
  const BaselineModel m = fit_one_matrix(s.train.dataset, threshold);
  return {prediction_error(predict(m, s.train.dataset), s.train.dataset),
          prediction_error(predict(m, s.test.dataset), s.test.dataset)};
}

Scores score_k_matrices(const NsweepConfig& cfg, const Split& s) {
  const Eigen::Index threshold =
      cfg.baseline_threshold != 0 ? cfg.baseline_threshold : default_baseline_threshold(cfg.spec.p);
  if (cfg.known_topics) {
    const BaselineModel m = fit_k_matrices(s.train.dataset, s.train.topics, threshold,
                                           cfg.fit.relax_iters, cfg.fit.relax_tol, cfg.fit.exec);
    return {prediction_error(predict(m, s.train.dataset, &s.train.topics), s.train.dataset),
            prediction_error(predict(m, s.test.dataset, &s.test.topics), s.test.dataset)};
  }
  KMatricesJointConfig kc = cfg.k_joint;
  kc.threshold = threshold;
  const BaselineModel m = fit_k_matrices_joint(s.train.dataset, cfg.spec.K, kc);
  const Matrix test_topics = infer_topics(m, s.test.dataset, kc.mstep_iters, kc.mstep_tol);
  return {prediction_error(predict(m, s.train.dataset, &*m.topics), s.train.dataset),
          prediction_error(predict(m, s.test.dataset, &test_topics), s.test.dataset)};
}

Json nan_to_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }
double null_to_nan(const Json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::factors: return "factors";
    case Method::one_matrix: return "one-matrix";
    case Method::k_matrices: return "k-matrices";
  }
  return "factors";
}

Method parse_method(const std::string& name) {
  if (name == "factors" || name == "ours") return Method::factors;
  if (name == "one-matrix") return Method::one_matrix;
  if (name == "k-matrices") return Method::k_matrices;
  throw ValidationError("unknown method '" + name + "'");
}

double SweepResult::median_error(const std::string& method, Eigen::Index n) const {
  std::vector<double> v;
  for (const auto& c : cells) {
    if (!c.failed && c.method == method && c.n == n) v.push_back(c.test_error);
  }
  return median_of(std::move(v));
}

double SweepResult::median_seconds(Eigen::Index p, Eigen::Index K) const {
  std::vector<double> v;
  for (const auto& c : cells) {
    if (!c.failed && c.p == p && c.K == K) v.push_back(c.seconds);
  }
  return median_of(std::move(v));
}

SweepResult run_nsweep(const NsweepConfig& cfg) {
  validate_spec(cfg.spec);
  if (cfg.n_values.empty() || cfg.seeds.empty() || cfg.methods.empty()) {
    throw ValidationError("run_nsweep: empty grid");
  }
  SweepResult out;
  out.kind = "nsweep";
  out.axis_name = "n";
  for (auto n : cfg.n_values) out.axis.push_back(static_cast<double>(n));
  out.seeds = cfg.seeds;
  out.config = {{"p", std::to_string(cfg.spec.p)},
                {"K", std::to_string(cfg.spec.K)},
                {"kind", kind_name(cfg.spec.kind)},
                {"noise", cfg.spec.noise == NoiseModel::gaussian ? "gaussian" : "protocol"},
                {"gaussian_sigma", format_double(cfg.spec.gaussian_sigma)},
                {"miss_frac", format_double(cfg.spec.miss_frac)},
                {"false_pos_frac", format_double(cfg.spec.false_pos_frac)},
                {"mask_rows", std::to_string(cfg.spec.mask_rows)},
                {"known_topics", cfg.known_topics ? "true" : "false"},
                {"min_test", std::to_string(cfg.min_test)},
                {"baseline_threshold",
                 std::to_string(cfg.baseline_threshold != 0
                                    ? cfg.baseline_threshold
                                    : default_baseline_threshold(cfg.spec.p))},
                {"sparsity", cfg.fit.sparsity != 0 ? std::to_string(cfg.fit.sparsity)
                                                   : std::string("2*s_star")}};

  for (auto n : cfg.n_values) {
    for (auto seed : cfg.seeds) {
      Split split;
      std::string split_error;
      try {
        split = make_split(cfg, n, seed);
      } catch (const std::exception& e) {
        split_error = e.what();
      }
      for (Method m : cfg.methods) {
        SweepCell cell;
        cell.method = method_name(m);
        cell.p = cfg.spec.p;
        cell.K = cfg.spec.K;
        cell.n = n;
        cell.seed = seed;
        const auto t0 = Clock::now();
        try {
          if (!split_error.empty()) throw Error(split_error);
          Scores sc;
          switch (m) {
            case Method::factors: sc = score_factors(cfg, split); break;
            case Method::one_matrix: sc = score_one_matrix(cfg, split); break;
            case Method::k_matrices: sc = score_k_matrices(cfg, split); break;
          }
          cell.train_error = sc.train;
          cell.test_error = sc.test;
        } catch (const std::exception& e) {
          cell.failed = true;
          cell.failure = e.what();
          cell.train_error = kNaN;
          cell.test_error = kNaN;
        }
        cell.seconds = seconds_since(t0);
        out.cells.push_back(std::move(cell));
      }
    }
  }
  return out;
}

SweepResult run_runtime_grid(const std::vector<Eigen::Index>& p_values,
                             const std::vector<Eigen::Index>& K_values, Eigen::Index n, int T,
                             int repeats, std::uint64_t seed) {
  if (p_values.empty() || K_values.empty()) throw ValidationError("run_runtime_grid: empty grid");
  if (T < 1 || repeats < 1 || n < 1) throw ValidationError("run_runtime_grid: T, repeats, n >= 1");
  SweepResult out;
  out.kind = "runtime";
  out.axis_name = "p,K";
  out.seeds = {seed};
  out.config = {{"n", std::to_string(n)},
                {"T", std::to_string(T)},
                {"repeats", std::to_string(repeats)},
                {"route", "per_observation"}};
  for (auto p : p_values) {
    for (auto k : K_values) {
      out.axis.push_back(static_cast<double>(p));
      SweepCell cell;
      cell.method = method_name(Method::factors);
      cell.p = p;
      cell.K = k;
      cell.n = n;
      cell.seed = seed;
      try {
        SynthSpec spec;
        spec.p = p;
        spec.K = k;
        spec.n = n;
        spec.seed = seed;
        const SynthInstance inst = gen_instance(spec);
        FitConfig fit;
        fit.max_iters = T;
        fit.tol = 0.0;
        fit.route = GradientRoute::per_observation;
        fit.sparsity = sparsity_from_truth(inst.truth);
        const FactorPair start = balance_columns(inst.truth);
        std::vector<double> per_iter;
        for (int r = 0; r < repeats; ++r) {
          const KnownFit f = fit_known(inst.dataset, inst.topics, fit, start);
          per_iter.push_back(f.report.wall_time / std::max(1, f.report.iters_run));
        }
        cell.seconds = median_of(per_iter);
        cell.train_error = kNaN;
        cell.test_error = kNaN;
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.failure = e.what();
        cell.seconds = kNaN;
        cell.train_error = kNaN;
        cell.test_error = kNaN;
      }
      out.cells.push_back(std::move(cell));
    }
  }
  return out;
}

void fit_log_linear(const std::vector<double>& values, int begin, int end, ConvergenceTrace& out) {
  out.window_begin = begin;
  out.window_end = end;
  out.slope = 0.0;
  out.intercept = 0.0;
  out.fit_deviation = 0.0;
  out.max_ratio = 0.0;
  const int count = end - begin;
  if (count < 2) return;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (int t = begin; t < end; ++t) {
    const double y = std::log(values[static_cast<std::size_t>(t)]);
    st += t;
    sy += y;
    stt += static_cast<double>(t) * t;
    sty += t * y;
  }
  const double denom = count * stt - st * st;
  out.slope = (count * sty - st * sy) / denom;
  out.intercept = (sy - out.slope * st) / count;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double worst = 0.0;
  for (int t = begin; t < end; ++t) {
    const double y = std::log(values[static_cast<std::size_t>(t)]);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
    worst = std::max(worst, std::abs(y - (out.intercept + out.slope * t)));
    if (t + 1 < end) {
      out.max_ratio = std::max(out.max_ratio, values[static_cast<std::size_t>(t) + 1] /
                                                  values[static_cast<std::size_t>(t)]);
    }
  }
  out.fit_deviation = hi > lo ? worst / (hi - lo) : 0.0;
}

ConvergenceTrace run_convergence_trace(const SynthSpec& spec_in, bool noiseless,
                                       const TraceConfig& cfg) {
  SynthSpec spec = spec_in;
  if (noiseless) {
    spec.noise = NoiseModel::protocol;
    spec.miss_frac = 0.0;
    spec.noise_mult_range = {1.0, 1.0};
    spec.false_pos_frac = 0.0;
    spec.kind = ObservationKind::real;
  }
  const SynthInstance inst = gen_instance(spec);
  const FactorPair truth = balance_columns(inst.truth);
  FitConfig fit = cfg.fit;
  if (fit.sparsity == 0) fit.sparsity = sparsity_from_truth(inst.truth);

  FactorPair start = cfg.start_at_truth
                         ? truth
                         : init_convex(inst.dataset, inst.topics, spec.K, fit.relax_iters,
                                       fit.relax_tol, fit.exec);
  if (cfg.start_perturbation > 0.0) {
    Rng rng(derive_seed(spec.seed, 0x7E57));
    for (Matrix* m : {&start.influence, &start.receptivity}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        m->data()[i] *= rng.uniform(1.0 - cfg.start_perturbation, 1.0 + cfg.start_perturbation);
      }
    }
  }

  ConvergenceTrace out;
  out.report = fit_known(inst.dataset, inst.topics, fit, start, &truth).report;
  out.grad_norm_at_truth =
      grad_norm_at_truth(thetas_from_factors(inst.truth), inst.dataset, inst.topics, fit.exec);

  std::vector<double> d{*out.report.initial_distance};
  d.insert(d.end(), out.report.dist_trace.begin(), out.report.dist_trace.end());
  out.plateau = d.back();
  // Contraction window: from the start until d² first reaches ten times its final level, or
  // a floor far below the starting distance when the final level is numerically zero.
  const double floor = std::max({10.0 * out.plateau, 1e-20 * d.front(),
                                 std::numeric_limits<double>::min()});
  int end = 0;
  while (end < static_cast<int>(d.size()) && d[static_cast<std::size_t>(end)] > floor) ++end;
  fit_log_linear(d, 0, end, out);
  return out;
}

std::string sweep_to_json(const SweepResult& r) {
  Json j;
  j["kind"] = r.kind;
  j["axis_name"] = r.axis_name;
  j["axis"] = r.axis;
  j["seeds"] = r.seeds;
  Json cfg = Json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json e;
    e["method"] = c.method;
    e["p"] = c.p;
    e["K"] = c.K;
    e["n"] = c.n;
    e["seed"] = c.seed;
    e["test_error"] = nan_to_null(c.test_error);
    e["train_error"] = nan_to_null(c.train_error);
    e["seconds"] = nan_to_null(c.seconds);
    e["failed"] = c.failed;
    e["failure"] = c.failure;
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

SweepResult sweep_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep result: ") + e.what());
  }
  SweepResult r;
  try {
    r.kind = j.at("kind").get<std::string>();
    r.axis_name = j.at("axis_name").get<std::string>();
    r.axis = j.at("axis").get<std::vector<double>>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& [k, v] : j.at("config").items()) r.config[k] = v.get<std::string>();
    for (const auto& e : j.at("cells")) {
      SweepCell c;
      c.method = e.at("method").get<std::string>();
      c.p = e.at("p").get<Eigen::Index>();
      c.K = e.at("K").get<Eigen::Index>();
      c.n = e.at("n").get<Eigen::Index>();
      c.seed = e.at("seed").get<std::uint64_t>();
      c.test_error = null_to_nan(e.at("test_error"));
      c.train_error = null_to_nan(e.at("train_error"));
      c.seconds = null_to_nan(e.at("seconds"));
      c.failed = e.at("failed").get<bool>();
      c.failure = e.at("failure").get<std::string>();
      r.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep result: ") + e.what());
  }
  return r;
}

std::string sweep_to_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "method,p,K,n,seed,test_error,train_error,seconds,status\n";
  auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& c : r.cells) {
    os << c.method << ',' << c.p << ',' << c.K << ',' << c.n << ',' << c.seed << ','
       << num(c.test_error) << ',' << num(c.train_error) << ',' << num(c.seconds) << ','
       << (c.failed ? "failed" : "ok") << '\n';
  }
  return os.str();
}

std::string sweep_to_svg(const SweepResult& r) {
  constexpr double W = 640, H = 400, L = 70, R = 150, T = 20, B = 50;
  std::vector<std::string> methods;
  for (const auto& c : r.cells) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
      methods.push_back(c.method);
    }
  }
  std::vector<Eigen::Index> ns;
  for (double a : r.axis) ns.push_back(static_cast<Eigen::Index>(a));
  double ymax = 0.0;
  for (const auto& m : methods) {
    for (auto n : ns) {
      const double v = r.median_error(m, n);
      if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
  }
  if (ymax <= 0.0) ymax = 1.0;
  const double xmin = ns.empty() ? 0.0 : static_cast<double>(*std::min_element(ns.begin(), ns.end()));
  double xmax = ns.empty() ? 1.0 : static_cast<double>(*std::max_element(ns.begin(), ns.end()));
  if (xmax <= xmin) xmax = xmin + 1.0;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / (1.05 * ymax) * (H - T - B); };

  static const char* colors[] = {"#1b6ca8", "#d1495b", "#66a182", "#edae49", "#6c4f77"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  for (auto n : ns) {
    os << "<text x=\"" << px(static_cast<double>(n)) << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = 1.05 * ymax * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", y);
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << label
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
     << "\" text-anchor=\"middle\">n</text>\n";
  os << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 15 "
     << (T + H - B) / 2 << ")\" text-anchor=\"middle\">median test error</text>\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const char* color = colors[m % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (auto n : ns) {
      const double v = r.median_error(methods[m], n);
      if (std::isfinite(v)) os << px(static_cast<double>(n)) << ',' << py(v) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 20 + 18 * static_cast<double>(m)
       << "\" fill=\"" << color << "\">" << methods[m] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace topicnet
