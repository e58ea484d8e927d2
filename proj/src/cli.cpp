#include "topicnet/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "topicnet/baselines.hpp"
#include "topicnet/errors.hpp"
#include "topicnet/estimator_joint.hpp"
#include "topicnet/estimator_known.hpp"
#include "topicnet/experiments.hpp"
#include "topicnet/io.hpp"
#include "topicnet/model.hpp"
#include "topicnet/objective.hpp"
#include "topicnet/synthgen.hpp"
#include "topicnet/text.hpp"

namespace topicnet {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct GlobalOptions {
  bool parallel = false;
  bool deterministic = false;
  int threads = 0;
  bool error_json = false;

  Execution exec() const {
    if (!parallel || deterministic) return Execution::sequential();
    Execution e = Execution::from_environment();
    if (threads > 0) e.threads = threads;
    return e;
  }
};

struct SimulateOptions {
  SynthSpec spec;
  std::vector<int> topics_per_row{1, 3};
  std::vector<double> value_range{1.0, 2.0};
  std::vector<int> topics_per_obs{1, 3};
  std::vector<double> noise_mult{0.3, 3.0};
  std::string kind = "real";
  std::string noise = "protocol";
  bool noiseless = false;
  bool hide_topics = false;
  std::string out;
  std::string truth;
};

struct FitOptions {
  std::string data;
  std::string out;
  Eigen::Index K = 0;
  Eigen::Index sparsity = 0;
  double lambda = 1.0;
  std::string eta = "auto";
  int iters = 20000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::string route = "auto";
  int outer_iters = 500;
  double outer_tol = 1e-10;
  int inner_iters = 100;
};

struct EvaluateOptions {
  std::string model;
  std::string data;
  std::string truth;
  std::string out;
};

struct BaselineOptions {
  std::string method = "one-matrix";
  std::string data;
  std::string out;
  Eigen::Index K = 0;
  Eigen::Index threshold = -1;
  int iters = 500;
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

struct SweepOptions {
  Eigen::Index p = 50;
  Eigen::Index K = 5;
  std::vector<Eigen::Index> n_values{20, 30, 50, 80, 120, 200};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::vector<std::string> methods{"factors", "one-matrix", "k-matrices"};
  std::string kind = "real";
  bool unknown_topics = false;
  Eigen::Index min_test = 50;
  std::string json;
  std::string csv;
  std::string svg;
};

struct BenchOptions {
  std::vector<Eigen::Index> p_values{50, 100};
  std::vector<Eigen::Index> K_values{5, 10};
  Eigen::Index n = 100;
  int iters = 20;
  int repeats = 3;
  std::uint64_t seed = 0;
  std::string json;
  std::string csv;
};

ObservationKind parse_kind(const std::string& s) {
  if (s == "real") return ObservationKind::real;
  if (s == "binary") return ObservationKind::binary;
  throw ValidationError("kind must be 'real' or 'binary', got '" + s + "'");
}

GradientRoute parse_route(const std::string& s) {
  if (s == "auto") return GradientRoute::automatic;
  if (s == "per-observation") return GradientRoute::per_observation;
  if (s == "moments") return GradientRoute::moments;
  throw ValidationError("route must be auto, per-observation or moments");
}

std::optional<double> parse_eta(const std::string& s) {
  if (s == "auto") return std::nullopt;
  const auto v = parse_double(s);
  if (!v || !(*v > 0.0) || !std::isfinite(*v)) {
    throw ValidationError("--eta must be 'auto' or a positive number, got '" + s + "'");
  }
  return v;
}

FitConfig fit_config(const FitOptions& o, const GlobalOptions& g) {
  FitConfig cfg;
  cfg.sparsity = o.sparsity;
  cfg.step = parse_eta(o.eta);
  cfg.lambda = o.lambda;
  cfg.max_iters = o.iters;
  cfg.tol = o.tol;
  cfg.seed = o.seed;
  cfg.route = parse_route(o.route);
  cfg.exec = g.exec();
  return cfg;
}

Json fit_config_json(const FitOptions& o, Eigen::Index k, Eigen::Index sparsity) {
  Json j;
  j["K"] = k;
  j["s"] = sparsity;
  j["lambda"] = o.lambda;
  j["eta"] = o.eta;
  j["iters"] = o.iters;
  j["tol"] = o.tol;
  j["seed"] = o.seed;
  j["route"] = o.route;
  return j;
}

Eigen::Index resolve_topics(Eigen::Index requested, const Dataset& ds) {
  if (requested != 0 && requested != ds.topics) {
    throw ValidationError("--K " + std::to_string(requested) + " does not match the dataset K = " +
                          std::to_string(ds.topics));
  }
  return ds.topics;
}

void emit(std::ostream& out, const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (!path.empty()) write_text(path, text);
  out << text;
}

int cmd_simulate(SimulateOptions o, std::ostream& out) {
  SynthSpec& s = o.spec;
  if (o.topics_per_row.size() != 2 || o.topics_per_obs.size() != 2 || o.value_range.size() != 2 ||
      o.noise_mult.size() != 2) {
    throw ValidationError("range options take exactly two values");
  }
  s.topics_per_row = {o.topics_per_row[0], o.topics_per_row[1]};
  s.topics_per_obs = {o.topics_per_obs[0], o.topics_per_obs[1]};
  s.value_range = {o.value_range[0], o.value_range[1]};
  s.noise_mult_range = {o.noise_mult[0], o.noise_mult[1]};
  s.kind = parse_kind(o.kind);
  if (o.noise == "protocol") {
    s.noise = NoiseModel::protocol;
  } else if (o.noise == "gaussian") {
    s.noise = NoiseModel::gaussian;
  } else {
    throw ValidationError("noise must be 'protocol' or 'gaussian'");
  }
  if (o.noiseless) {
    s.noise = NoiseModel::protocol;
    s.miss_frac = 0.0;
    s.false_pos_frac = 0.0;
    s.noise_mult_range = {1.0, 1.0};
    s.gaussian_sigma = 0.0;
  }
  validate_spec(s);
  SynthInstance inst = gen_instance(s);
  const Matrix topics = inst.topics;
  if (o.hide_topics) {
    inst.dataset.topics_known = false;
    for (auto& obs : inst.dataset.observations) obs.topics.reset();
  }
  const fs::path root(o.out);
  const fs::path data_dir = root / "data";
  const fs::path truth_dir = o.truth.empty() ? root / "truth" : fs::path(o.truth);
  Json provenance;
  provenance["seed"] = s.seed;
  provenance["truth_stream"] = kTruthStream;
  provenance["observation_stream"] = inst.observation_stream;
  save_dataset(inst.dataset, data_dir, provenance);
  save_ground_truth({inst.truth, topics, s}, truth_dir);
  out << "data: " << data_dir.string() << "\n"
      << "truth: " << truth_dir.string() << "\n";
  return kExitOk;
}

int cmd_fit(const FitOptions& o, const GlobalOptions& g, std::ostream& out) {
  const Dataset ds = load_dataset(o.data);
  if (!ds.topics_known) throw ValidationError(o.data + ": fit needs known topics; use fit-joint");
  const Eigen::Index k = resolve_topics(o.K, ds);
  const FitConfig cfg = fit_config(o, g);
  const KnownFit fit = fit_known(ds, ds.topic_matrix(), cfg);
  ModelFile m;
  m.type = ModelType::factors;
  m.factors = fit.factors;
  m.metadata["method"] = "fit";
  m.metadata["config"] = fit_config_json(o, k, fit.report.sparsity);
  m.metadata["step"] = fit.report.step;
  m.metadata["loss"] = fit.report.loss_trace.empty() ? fit.report.initial_loss
                                                     : fit.report.loss_trace.back();
  m.metadata["iterations"] = fit.report.iters_run;
  m.metadata["converged"] = fit.report.converged;
  if (!o.out.empty()) save_model(m, o.out);
  out << "loss: " << format_double(m.metadata["loss"].get<double>()) << "\n"
      << "iterations: " << fit.report.iters_run << "\n"
      << "converged: " << (fit.report.converged ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_fit_joint(const FitOptions& o, const GlobalOptions& g, std::ostream& out) {
  Dataset ds = load_dataset(o.data);
  const Eigen::Index k = o.K != 0 ? o.K : ds.topics;
  if (k < 1) throw ValidationError("--K must be positive");
  ds.topics = k;
  ds.topics_known = false;
  for (auto& obs : ds.observations) obs.topics.reset();
  JointConfig cfg;
  cfg.inner = fit_config(o, g);
  cfg.inner.max_iters = o.inner_iters;
  cfg.max_outer = o.outer_iters;
  cfg.outer_tol = o.outer_tol;
  const JointFit fit = fit_joint(ds, k, cfg);
  ModelFile m;
  m.type = ModelType::factors;
  m.factors = fit.factors;
  m.topics = fit.topics;
  Json config = fit_config_json(o, k, cfg.inner.sparsity);
  config["outer_iters"] = o.outer_iters;
  config["outer_tol"] = o.outer_tol;
  config["inner_iters"] = o.inner_iters;
  m.metadata["method"] = "fit-joint";
  m.metadata["config"] = config;
  m.metadata["loss"] = fit.report.loss_trace.empty() ? 0.0 : fit.report.loss_trace.back();
  m.metadata["iterations"] = fit.report.outer_iters;
  m.metadata["converged"] = fit.report.converged;
  Json degenerate = Json::array();
  for (auto c : fit.report.degenerate_components) degenerate.push_back(c);
  m.metadata["degenerate_components"] = degenerate;
  if (!o.out.empty()) save_model(m, o.out);
  out << "loss: " << format_double(m.metadata["loss"].get<double>()) << "\n"
      << "outer iterations: " << fit.report.outer_iters << "\n"
      << "converged: " << (fit.report.converged ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const ModelFile m = load_model(o.model);
  const Dataset ds = load_dataset(o.data);
  if (m.nodes() != ds.nodes) {
    throw DimensionError(o.model + ": model has p = " + std::to_string(m.nodes()) +
                         " but the dataset has p = " + std::to_string(ds.nodes));
  }
  Json report;
  report["model"] = m.type == ModelType::factors     ? "factors"
                    : m.type == ModelType::one_matrix ? "one-matrix"
                                                      : "k-matrices";
  report["n"] = ds.size();
  report["topics_inferred"] = !ds.topics_known || m.topics.has_value();
  report["parameter_count"] = m.parameter_count();

  std::vector<Matrix> preds;
  if (m.type == ModelType::factors) {
    // Learned topic labels need not match the dataset's, so such models infer their own.
    const bool use_given = ds.topics_known && !m.topics;
    if (use_given && ds.topics != m.topic_count()) {
      throw DimensionError("model K and dataset K differ");
    }
    const Matrix topics = use_given ? ds.topic_matrix() : infer_topics(m.factors, ds);
    preds = predict_dataset(m.factors, ds, topics);
  } else {
    const BaselineModel b = baseline_from_model(m);
    if (b.variant == BaselineVariant::one_matrix) {
      preds = predict(b, ds, nullptr);
    } else {
      const Matrix topics = ds.topics_known && !b.topics ? ds.topic_matrix() : infer_topics(b, ds);
      preds = predict(b, ds, &topics);
    }
  }
  report["prediction_error"] = prediction_error(preds, ds);

  if (!o.truth.empty()) {
    if (m.type != ModelType::factors) {
      throw ValidationError("factor distances need a factors model");
    }
    const GroundTruth truth = load_ground_truth(o.truth);
    if (truth.factors.nodes() != m.nodes() || truth.factors.topics() != m.topic_count()) {
      throw DimensionError(o.truth + ": ground truth shape differs from the model");
    }
    // Column k of a jointly learned model corresponds to truth column perm[k].
    FactorPair reference = balance_columns(truth.factors);
    if (m.topics && m.topics->rows() == truth.topics.rows()) {
      const auto perm = align_permutation(*m.topics, truth.topics);
      reference = permute_columns(reference, perm);
      report["d2_topics"] = distance_topics(*m.topics, permute_columns(truth.topics, perm));
      Json jp = Json::array();
      for (auto c : perm) jp.push_back(c);
      report["permutation"] = jp;
    }
    report["d2_factors"] = subspace_distance(m.factors, reference);
  }
  emit(out, report, o.out);
  return kExitOk;
}

int cmd_baseline(const BaselineOptions& o, const GlobalOptions& g, std::ostream& out) {
  const Dataset ds = load_dataset(o.data);
  const Method method = parse_method(o.method);
  if (method == Method::factors) throw ValidationError("--method must be one-matrix or k-matrices");
  const Eigen::Index threshold =
      o.threshold < 0 ? default_baseline_threshold(ds.nodes) : o.threshold;
  BaselineModel b;
  if (method == Method::one_matrix) {
    b = fit_one_matrix(ds, threshold);
  } else if (ds.topics_known) {
    resolve_topics(o.K, ds);
    b = fit_k_matrices(ds, ds.topic_matrix(), threshold, 5000, 1e-10, g.exec());
  } else {
    KMatricesJointConfig cfg;
    cfg.threshold = threshold;
    cfg.iters = o.iters;
    cfg.tol = o.tol;
    cfg.seed = o.seed;
    cfg.exec = g.exec();
    b = fit_k_matrices_joint(ds, o.K != 0 ? o.K : ds.topics, cfg);
  }
  ModelFile m = model_from_baseline(b);
  m.metadata["method"] = o.method;
  m.metadata["threshold"] = threshold;
  m.metadata["training_loss"] = b.training_loss;
  m.metadata["iterations"] = b.iterations;
  if (!o.out.empty()) save_model(m, o.out);
  out << "training loss: " << format_double(b.training_loss) << "\n"
      << "parameters: " << m.parameter_count() << "\n";
  return kExitOk;
}

int cmd_sweep(const SweepOptions& o, const GlobalOptions& g, std::ostream& out) {
  NsweepConfig cfg;
  cfg.spec.p = o.p;
  cfg.spec.K = o.K;
  cfg.spec.kind = parse_kind(o.kind);
  cfg.n_values = o.n_values;
  cfg.seeds = o.seeds;
  cfg.methods.clear();
  for (const auto& name : o.methods) cfg.methods.push_back(parse_method(name));
  cfg.known_topics = !o.unknown_topics;
  cfg.min_test = o.min_test;
  cfg.fit.exec = g.exec();
  cfg.joint.inner.exec = g.exec();
  cfg.k_joint.exec = g.exec();
  const SweepResult r = run_nsweep(cfg);
  if (!o.json.empty()) write_text(o.json, sweep_to_json(r));
  if (!o.svg.empty()) write_text(o.svg, sweep_to_svg(r));
  const std::string csv = sweep_to_csv(r);
  if (!o.csv.empty()) write_text(o.csv, csv);
  out << csv;
  return kExitOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  const SweepResult r = run_runtime_grid(o.p_values, o.K_values, o.n, o.iters, o.repeats, o.seed);
  if (!o.json.empty()) write_text(o.json, sweep_to_json(r));
  const std::string csv = sweep_to_csv(r);
  if (!o.csv.empty()) write_text(o.csv, csv);
  out << csv;
  return kExitOk;
}

int cmd_check_conditions(const std::string& truth_dir, std::ostream& out) {
  const GroundTruth t = load_ground_truth(truth_dir);
  const ConditionReport c = check_conditions(t.factors, t.topics);
  Json j;
  j["mu_theta"] = c.mu_theta;
  j["L_theta"] = c.L_theta;
  j["mu_M"] = c.mu_M;
  j["rho0"] = c.rho0;
  j["eta_oc"] = c.eta_oc;
  j["sigma_max"] = c.sigma_max;
  j["s_star"] = c.s_star;
  j["qr_rank_deficient"] = c.qr_rank_deficient;
  emit(out, j, "");
  return kExitOk;
}

void report_error(std::ostream& err, const GlobalOptions& g, int code, const char* type,
                  const std::string& message) {
  if (g.error_json) {
    Json j;
    j["error"] = {{"code", code}, {"type", type}, {"message", message}};
    err << j.dump() << "\n";
  } else {
    err << "topicnet: " << message << "\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Influence and receptivity factor estimation from topic-tagged networks",
               "topicnet"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);
  GlobalOptions g;
  app.add_flag("--parallel", g.parallel, "Use the OpenMP kernels (threads from TOPICNET_THREADS)");
  app.add_flag("--deterministic", g.deterministic, "Force sequential reductions (default)");
  app.add_option("--threads", g.threads, "Thread count in parallel mode")->check(CLI::NonNegativeNumber);
  app.add_flag("--error-json", g.error_json, "Print errors as a JSON record");

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset and its ground truth");
  sim->add_option("--out", so.out, "Output directory (data/ and truth/ are created)")->required();
  sim->add_option("--truth", so.truth, "Ground-truth directory (default OUT/truth)");
  sim->add_option("--p", so.spec.p, "Number of nodes")->capture_default_str();
  sim->add_option("--K", so.spec.K, "Number of topics")->capture_default_str();
  sim->add_option("--n", so.spec.n, "Number of observations")->capture_default_str();
  sim->add_option("--seed", so.spec.seed, "Master seed")->capture_default_str();
  sim->add_option("--kind", so.kind, "real or binary")->capture_default_str();
  sim->add_option("--noise", so.noise, "protocol or gaussian")->capture_default_str();
  sim->add_option("--sigma", so.spec.gaussian_sigma, "Gaussian noise level");
  sim->add_option("--miss-frac", so.spec.miss_frac, "Fraction of true edges dropped");
  sim->add_option("--false-pos-frac", so.spec.false_pos_frac, "Fraction of false edges added");
  sim->add_option("--noise-mult", so.noise_mult, "Multiplicative noise range (lo hi)")->expected(2);
  sim->add_option("--topics-per-row", so.topics_per_row, "Topics per factor row (lo hi)")->expected(2);
  sim->add_option("--value-range", so.value_range, "Factor entry range (lo hi)")->expected(2);
  sim->add_option("--topics-per-obs", so.topics_per_obs, "Topics per observation (lo hi)")->expected(2);
  sim->add_option("--mask-rows", so.spec.mask_rows, "Author rows per observation mask");
  sim->add_flag("--share-topics", so.spec.share_topics, "Receptivity rows reuse influence topics");
  sim->add_flag("--noiseless", so.noiseless, "Disable every corruption");
  sim->add_flag("--hide-topics", so.hide_topics, "Omit topics from the dataset");

  FitOptions fo;
  auto add_fit_flags = [&fo](CLI::App* c) {
    c->add_option("--data", fo.data, "Dataset directory")->required();
    c->add_option("--out", fo.out, "Model file to write");
    c->add_option("--K", fo.K, "Number of topics (default: from the dataset)");
    c->add_option("--s", fo.sparsity, "Nonzeros kept per factor matrix (0 = default)");
    c->add_option("--lambda", fo.lambda, "Balance regularization weight")->capture_default_str();
    c->add_option("--eta", fo.eta, "Step size, or 'auto'")->capture_default_str();
    c->add_option("--iters", fo.iters, "Iteration budget")->capture_default_str();
    c->add_option("--tol", fo.tol, "Relative objective tolerance")->capture_default_str();
    c->add_option("--seed", fo.seed, "Seed")->capture_default_str();
    c->add_option("--route", fo.route, "auto, per-observation or moments")->capture_default_str();
  };
  auto* fit = app.add_subcommand("fit", "Estimate factors with known topics");
  add_fit_flags(fit);
  auto* joint = app.add_subcommand("fit-joint", "Estimate factors and topics jointly");
  add_fit_flags(joint);
  joint->add_option("--outer-iters", fo.outer_iters, "Outer rounds")->capture_default_str();
  joint->add_option("--outer-tol", fo.outer_tol, "Outer relative tolerance")->capture_default_str();
  joint->add_option("--inner-iters", fo.inner_iters, "Factor iterations per round")->capture_default_str();

  EvaluateOptions eo;
  auto* eval = app.add_subcommand("evaluate", "Prediction error and distances to ground truth");
  eval->add_option("--model", eo.model, "Model file")->required();
  eval->add_option("--data", eo.data, "Dataset directory")->required();
  eval->add_option("--truth", eo.truth, "Ground-truth directory");
  eval->add_option("--out", eo.out, "Write the report here as well");

  BaselineOptions bo;
  auto* base = app.add_subcommand("baseline", "Fit a comparison model");
  base->add_option("--method", bo.method, "one-matrix or k-matrices")->capture_default_str();
  base->add_option("--data", bo.data, "Dataset directory")->required();
  base->add_option("--out", bo.out, "Model file to write");
  base->add_option("--K", bo.K, "Number of topics (default: from the dataset)");
  base->add_option("--threshold", bo.threshold, "Entries kept per matrix (default 4p, 0 keeps all)");
  base->add_option("--iters", bo.iters, "Iterations for unknown topics")->capture_default_str();
  base->add_option("--tol", bo.tol, "Relative tolerance for unknown topics")->capture_default_str();
  base->add_option("--seed", bo.seed, "Seed")->capture_default_str();

  SweepOptions wo;
  auto* sweep = app.add_subcommand("sweep", "Test error against n for every method");
  sweep->add_option("--p", wo.p, "Number of nodes")->capture_default_str();
  sweep->add_option("--K", wo.K, "Number of topics")->capture_default_str();
  sweep->add_option("--n-values", wo.n_values, "Training sizes")->delimiter(',');
  sweep->add_option("--seeds", wo.seeds, "Seeds")->delimiter(',');
  sweep->add_option("--methods", wo.methods, "factors, one-matrix, k-matrices")->delimiter(',');
  sweep->add_option("--kind", wo.kind, "real or binary")->capture_default_str();
  sweep->add_flag("--unknown-topics", wo.unknown_topics, "Learn topics jointly");
  sweep->add_option("--min-test", wo.min_test, "Minimum test size")->capture_default_str();
  sweep->add_option("--json", wo.json, "Write the result as JSON");
  sweep->add_option("--csv", wo.csv, "Write the result as CSV");
  sweep->add_option("--svg", wo.svg, "Write an error-vs-n plot");

  BenchOptions wb;
  auto* bench = app.add_subcommand("bench", "Per-iteration fit time over a (p, K) grid");
  bench->add_option("--p-values", wb.p_values, "Node counts")->delimiter(',');
  bench->add_option("--K-values", wb.K_values, "Topic counts")->delimiter(',');
  bench->add_option("--n", wb.n, "Observations")->capture_default_str();
  bench->add_option("--iters", wb.iters, "Iterations per timing")->capture_default_str();
  bench->add_option("--repeats", wb.repeats, "Repeats (median reported)")->capture_default_str();
  bench->add_option("--seed", wb.seed, "Seed")->capture_default_str();
  bench->add_option("--json", wb.json, "Write the result as JSON");
  bench->add_option("--csv", wb.csv, "Write the result as CSV");

  std::string truth_dir;
  auto* cond = app.add_subcommand("check-conditions", "Identifiability diagnostics of a ground truth");
  cond->add_option("--truth", truth_dir, "Ground-truth directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(so, out);
    if (*fit) return cmd_fit(fo, g, out);
    if (*joint) return cmd_fit_joint(fo, g, out);
    if (*eval) return cmd_evaluate(eo, out);
    if (*base) return cmd_baseline(bo, g, out);
    if (*sweep) return cmd_sweep(wo, g, out);
    if (*bench) return cmd_bench(wb, out);
    if (*cond) return cmd_check_conditions(truth_dir, out);
  } catch (const NumericError& e) {
    report_error(err, g, kExitNumeric, "numeric", e.what());
    return kExitNumeric;
  } catch (const DimensionError& e) {
    report_error(err, g, kExitData, "dimension", e.what());
    return kExitData;
  } catch (const ValidationError& e) {
    report_error(err, g, kExitData, "validation", e.what());
    return kExitData;
  } catch (const Error& e) {
    report_error(err, g, kExitData, "error", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    report_error(err, g, kExitData, "io", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace topicnet
