// rankad: train, run, and evaluate a ranking-based anomaly detector from the
// command line. Subcommands cover synthetic data, training (with optional
// grid-search model selection), detection, evaluation, level grids, and a
// latency comparison against the k-NN baseline.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rankad/common.hpp"
#include "rankad/datagen.hpp"
#include "rankad/detector.hpp"
#include "rankad/eval.hpp"
#include "rankad/io.hpp"
#include "rankad/kernel.hpp"
#include "rankad/knn.hpp"
#include "rankad/model_selection.hpp"
#include "rankad/pairs.hpp"
#include "rankad/ranksvm.hpp"

namespace {

using namespace rankad;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string num6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

void print_resolved(const CLI::App& cmd) {
  std::cerr << "# resolved config [" << cmd.get_name() << "]\n"
            << cmd.config_to_str(true, false);
}

std::vector<double> split_doubles(std::string_view text, char sep,
                                  const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view cell = text.substr(start, end - start);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw UsageError("cannot parse '" + std::string(cell) + "' in " + what);
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

// --------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string spec = "gmm-far";
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
  bool labels = false;
  std::string anomaly_spec = "uniform-box";
  std::size_t anomaly_n = 0;
  std::size_t dim = 2;
  double box_lo = -18.0;
  double box_hi = 18.0;
  std::string mixture;
};

/// "w,mu..,var..;w,mu..,var..": diagonal-covariance components, dimension
/// inferred from the token count.
MixtureSpec parse_mixture(const std::string& text) {
  if (text.empty()) {
    throw UsageError("--spec custom needs --mixture \"w,mu..,var..;..\"");
  }
  MixtureSpec spec;
  std::size_t d = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string::npos) end = text.size();
    const std::vector<double> vals = split_doubles(
        std::string_view(text).substr(start, end - start), ',', "--mixture");
    if (vals.size() < 3 || vals.size() % 2 == 0) {
      throw UsageError("each mixture component is weight,means..,variances.. "
                       "with one variance per coordinate");
    }
    const std::size_t cd = (vals.size() - 1) / 2;
    if (d == 0) {
      d = cd;
    } else if (cd != d) {
      throw UsageError("mixture components disagree on dimension");
    }
    GaussianComponent comp;
    comp.weight = vals[0];
    comp.mean.assign(vals.begin() + 1, vals.begin() + 1 + d);
    Matrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i) cov(i, i) = vals[1 + d + i];
    comp.covariance = std::move(cov);
    spec.components.push_back(std::move(comp));
    start = end + 1;
  }
  check_mixture(spec);
  return spec;
}

struct Sampler {
  std::size_t dim = 0;
  std::function<Matrix(std::size_t, std::uint64_t)> draw;
};

Sampler make_sampler(const std::string& name, const SynthArgs& args) {
  auto from_mixture = [](MixtureSpec spec) {
    Sampler s;
    s.dim = spec.dim();
    s.draw = [spec = std::move(spec)](std::size_t n, std::uint64_t seed) {
      return sample_mixture(spec, n, seed);
    };
    return s;
  };
  if (name == "gmm-close") return from_mixture(gmm_close_spec());
  if (name == "gmm-far") return from_mixture(gmm_far_spec());
  if (name == "normal1d") return from_mixture(normal1d_spec());
  if (name == "custom") return from_mixture(parse_mixture(args.mixture));
  if (name == "uniform-box") {
    UniformBoxSpec box;
    box.lower.assign(args.dim, args.box_lo);
    box.upper.assign(args.dim, args.box_hi);
    check_box(box);
    Sampler s;
    s.dim = args.dim;
    s.draw = [box = std::move(box)](std::size_t n, std::uint64_t seed) {
      return sample_uniform_box(box, n, seed);
    };
    return s;
  }
  throw UsageError("unknown spec '" + name +
                   "' (gmm-close, gmm-far, normal1d, uniform-box, custom)");
}

void run_synth(const SynthArgs& args) {
  const Sampler nominal = make_sampler(args.spec, args);
  Matrix features = nominal.draw(args.n, args.seed);

  std::vector<int> labels(features.rows(), 0);
  if (args.anomaly_n > 0) {
    const Sampler anomalous = make_sampler(args.anomaly_spec, args);
    if (anomalous.dim != nominal.dim) {
      throw UsageError("anomaly spec dimension " +
                       std::to_string(anomalous.dim) +
                       " does not match nominal dimension " +
                       std::to_string(nominal.dim));
    }
    const Matrix extra = anomalous.draw(args.anomaly_n, mix_seed(args.seed, 1));
    Matrix merged(features.rows() + extra.rows(), features.cols());
    std::copy(features.row_ptr(0), features.row_ptr(0) + features.values().size(),
              merged.row_ptr(0));
    std::copy(extra.row_ptr(0), extra.row_ptr(0) + extra.values().size(),
              merged.row_ptr(features.rows()));
    features = std::move(merged);
    labels.resize(features.rows(), 1);
  }

  const bool labeled = args.labels || args.anomaly_n > 0;
  save_dataset_csv(args.out, features, labeled ? &labels : nullptr);
  std::cout << "wrote " << features.rows() << " rows ("
            << features.rows() - args.anomaly_n << " nominal, "
            << args.anomaly_n << " anomalous) to " << args.out << "\n";
}

void setup_synth(CLI::App& app) {
  auto args = std::make_shared<SynthArgs>();
  CLI::App* cmd = app.add_subcommand(
      "synth", "Emit a seeded synthetic dataset to CSV");
  cmd->add_option("--spec", args->spec,
                  "gmm-close | gmm-far | normal1d | uniform-box | custom")
      ->capture_default_str();
  cmd->add_option("--n", args->n, "Nominal sample count")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args->seed, "RNG seed")->capture_default_str();
  cmd->add_option("--out", args->out, "Output CSV path")->required();
  cmd->add_flag("--labels", args->labels,
                "Append a 0/1 label column even without anomalies");
  cmd->add_option("--anomaly-spec", args->anomaly_spec,
                  "Spec for appended anomalous rows")
      ->capture_default_str();
  cmd->add_option("--anomaly-n", args->anomaly_n,
                  "Anomalous rows to append (implies labels)")
      ->capture_default_str();
  cmd->add_option("--dim", args->dim, "Dimension for uniform-box")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--box-lo", args->box_lo, "uniform-box lower corner")
      ->capture_default_str();
  cmd->add_option("--box-hi", args->box_hi, "uniform-box upper corner")
      ->capture_default_str();
  cmd->add_option("--mixture", args->mixture,
                  "Custom diagonal mixture: \"w,mu..,var..;w,mu..,var..\"");
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd] {
    print_resolved(*cmd);
    run_synth(*args);
  });
}

// --------------------------------------------------------------------------
// train / cv

struct TrainArgs {
  std::string data;
  std::string out;
  std::size_t k = kDefaultNeighbors;
  int m = kDefaultQuantizationLevels;
  double c = 1.0;
  double sigma = 1.0;
  bool cv = false;
  std::size_t pair_cap = kDefaultPairCap;
  std::uint64_t seed = 0;
  double tol = 1e-4;
  std::size_t max_epochs = 10000;
  std::size_t folds = 4;
  std::size_t cv_max_epochs = 1000;
  std::size_t cv_probes = 0;
  unsigned threads = 1;
  std::string cv_report;
  std::vector<double> c_grid;
  std::vector<double> sigma_grid;
};

std::string cv_report_csv(const CvReport& report) {
  std::string text = "c,sigma,mean_disagreement,folds_used,converged_all,chosen\n";
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    const CvCandidate& cand = report.candidates[i];
    text += num(cand.c) + ',' + num(cand.sigma) + ',' +
            num(cand.mean_disagreement) + ',' +
            std::to_string(cand.folds_used) + ',' +
            (cand.converged_all ? '1' : '0') + ',' +
            (i == report.chosen_index ? '1' : '0') + '\n';
  }
  return text;
}

ParamGrid resolve_grid(const TrainArgs& args, const NominalDataset& data) {
  ParamGrid grid;
  grid.c_values = args.c_grid.empty() ? default_c_grid() : args.c_grid;
  if (args.sigma_grid.empty()) {
    const double pivot = mean_knn_distance(data, args.k);
    std::cerr << "# sigma grid pivot (mean k-NN distance) = " << num(pivot)
              << "\n";
    grid.sigma_values = default_sigma_grid(pivot);
  } else {
    grid.sigma_values = args.sigma_grid;
  }
  return grid;
}

CvOptions resolve_cv_options(const TrainArgs& args) {
  CvOptions opt;
  opt.k = args.k;
  opt.m = args.m;
  opt.folds = args.folds;
  opt.seed = args.seed;
  opt.pair_cap = args.pair_cap;
  opt.tol = args.tol;
  opt.max_epochs = args.cv_max_epochs;
  opt.threads = args.threads;
  opt.probes = args.cv_probes;
  return opt;
}

void run_train(const TrainArgs& args, bool have_c, bool have_sigma) {
  if (!args.cv && (!have_c || !have_sigma)) {
    throw UsageError("provide --c and --sigma, or pass --cv to search them");
  }
  LoadedDataset raw = load_dataset(args.data, false);
  NominalDataset data(std::move(raw.features));

  double c = args.c;
  double sigma = args.sigma;
  PreferencePairSet pairs;
  if (args.cv) {
    const ParamGrid grid = resolve_grid(args, data);
    const CvReport report = cv_select(data, grid, resolve_cv_options(args));
    const CvCandidate& best = report.chosen();
    c = best.c;
    sigma = best.sigma;
    pairs = report.pairs;
    std::cout << "cv chose c = " << num(c) << ", sigma = " << num(sigma)
              << " (mean disagreement " << num6(best.mean_disagreement)
              << " over " << best.folds_used << " folds";
    if (report.probes_total > 0) {
      std::cout << ", " << report.probes_far << " of " << report.probes_total
                << " background probes in play";
    }
    std::cout << ")\n";
    if (!args.cv_report.empty()) {
      write_text(args.cv_report, cv_report_csv(report));
      std::cout << "wrote cv report to " << args.cv_report << "\n";
    }
  } else {
    const ScoreVector scores = aknn_scores(data, args.k);
    const QuantizedLevels levels =
        quantize_ranks(ranks_from_scores(scores), args.m);
    pairs = generate_pairs(levels);
    if (pairs.empty()) {
      throw DataError("quantization produced a single level; nothing to rank");
    }
    pairs = subsample_pairs(pairs, args.pair_cap, mix_seed(args.seed, 1));
  }

  SolverConfig cfg;
  cfg.c = c;
  cfg.tol = args.tol;
  cfg.max_epochs = args.max_epochs;
  cfg.seed = mix_seed(args.seed, 2);
  const RankModel model = train(data, pairs, KernelSpec{sigma}, cfg);

  ModelBundle bundle;
  bundle.detector = build_detector(model, data);
  bundle.k = args.k;
  bundle.m = args.m;
  bundle.pair_cap = args.pair_cap;
  bundle.pair_seed = mix_seed(args.seed, 1);
  save_model(bundle, args.out);

  std::cout << "trained on " << data.size() << " points (d = " << data.dim()
            << ", " << pairs.size() << " pairs): c = " << num(c)
            << ", sigma = " << num(sigma)
            << ", support points = " << model.betas.size()
            << ", support pairs = " << model.meta.support_pairs
            << ", epochs = " << model.meta.epochs
            << ", converged = " << (model.meta.converged ? "yes" : "no")
            << ", dual objective = " << num(model.meta.dual_objective) << "\n";
  std::cout << "wrote model to " << args.out << "\n";
}

void add_common_train_options(CLI::App* cmd, TrainArgs& args) {
  cmd->add_option("--k", args.k, "Neighbor count for the k-NN statistic")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--m", args.m, "Quantization levels")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--pair-cap", args.pair_cap,
                  "Subsample preference pairs above this count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "Base seed for subsampling, folds, "
                                       "and the solver")
      ->capture_default_str();
  cmd->add_option("--tol", args.tol, "Solver KKT tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--folds", args.folds, "Cross-validation folds")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  cmd->add_option("--threads", args.threads,
                  "Worker threads for cross-validation")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cv-probes", args.cv_probes,
                  "Background probes contrasted against held-out folds "
                  "during cross-validation (0 disables)")
      ->capture_default_str();
  cmd->add_option("--c-grid", args.c_grid,
                  "Ascending C grid (default: 0.001 to 1000)")
      ->expected(-1);
  cmd->add_option("--sigma-grid", args.sigma_grid,
                  "Ascending sigma grid (default: powers of two around the "
                  "mean k-NN distance)")
      ->expected(-1);
}

void setup_train(CLI::App& app) {
  auto args = std::make_shared<TrainArgs>();
  CLI::App* cmd = app.add_subcommand(
      "train", "Train a detector from a nominal CSV and save it");
  cmd->add_option("--data", args->data, "Nominal training CSV")->required();
  cmd->add_option("--out", args->out, "Model output path")->required();
  CLI::Option* c_opt =
      cmd->add_option("--c", args->c, "Ranking SVM cost parameter")
          ->check(CLI::PositiveNumber);
  CLI::Option* sigma_opt =
      cmd->add_option("--sigma", args->sigma, "RBF kernel width")
          ->check(CLI::PositiveNumber);
  cmd->add_flag("--cv", args->cv, "Pick c and sigma by cross-validation");
  cmd->add_option("--max-epochs", args->max_epochs,
                  "Epoch cap for the final training run")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cv-max-epochs", args->cv_max_epochs,
                  "Epoch cap per cross-validation candidate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cv-report", args->cv_report,
                  "Optional CSV of all grid candidates");
  add_common_train_options(cmd, *args);
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd, c_opt, sigma_opt] {
    print_resolved(*cmd);
    run_train(*args, c_opt->count() > 0, sigma_opt->count() > 0);
  });
}

void setup_cv(CLI::App& app) {
  auto args = std::make_shared<TrainArgs>();
  CLI::App* cmd = app.add_subcommand(
      "cv", "Grid-search c and sigma by cross-validation, report only");
  cmd->add_option("--data", args->data, "Nominal training CSV")->required();
  cmd->add_option("--out", args->cv_report,
                  "Report CSV path (default: stdout)");
  cmd->add_option("--max-epochs", args->cv_max_epochs,
                  "Epoch cap per candidate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_common_train_options(cmd, *args);
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd] {
    print_resolved(*cmd);
    LoadedDataset raw = load_dataset(args->data, false);
    NominalDataset data(std::move(raw.features));
    const ParamGrid grid = resolve_grid(*args, data);
    const CvReport report = cv_select(data, grid, resolve_cv_options(*args));
    write_text(args->cv_report, cv_report_csv(report));
    const CvCandidate& best = report.chosen();
    std::cerr << "# chosen: c=" << num(best.c) << " sigma=" << num(best.sigma)
              << " mean_disagreement=" << num6(best.mean_disagreement)
              << "\n";
  });
}

// --------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string model;
  std::string data;
  double alpha = 0.05;
  std::string out;
};

void run_detect(const DetectArgs& args) {
  const ModelBundle bundle = load_model(args.model);
  const LoadedDataset raw = load_dataset(args.data, false);
  if (raw.features.cols() != bundle.detector.model.dim) {
    throw DataError("data has dimension " +
                    std::to_string(raw.features.cols()) +
                    " but the model expects " +
                    std::to_string(bundle.detector.model.dim));
  }
  std::string text = "score,rank,is_anomaly\n";
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < raw.features.rows(); ++i) {
    const DetectionResult res =
        classify(bundle.detector, raw.features.row(i), args.alpha);
    text += num(res.score) + ',' + num(res.rank) + ',' +
            (res.is_anomaly ? '1' : '0') + '\n';
    if (res.is_anomaly) ++flagged;
  }
  write_text(args.out, text);
  std::cerr << "# flagged " << flagged << " of " << raw.features.rows()
            << " rows at alpha=" << num(args.alpha) << "\n";
}

void setup_detect(CLI::App& app) {
  auto args = std::make_shared<DetectArgs>();
  CLI::App* cmd = app.add_subcommand(
      "detect", "Score a CSV with a saved model and flag anomalies");
  cmd->add_option("--model", args->model, "Model path")->required();
  cmd->add_option("--data", args->data, "Test CSV (no labels)")->required();
  cmd->add_option("--alpha", args->alpha, "False-alarm level in [0, 1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--out", args->out, "Output CSV path (default: stdout)");
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd] {
    print_resolved(*cmd);
    run_detect(*args);
  });
}

// --------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string model;
  std::string data;
  std::vector<double> alphas;
  std::string roc_out;
};

void run_eval(const EvalArgs& args) {
  const ModelBundle bundle = load_model(args.model);
  const LoadedDataset raw = load_dataset(args.data, true);
  if (raw.features.cols() != bundle.detector.model.dim) {
    throw DataError("data has dimension " +
                    std::to_string(raw.features.cols()) +
                    " but the model expects " +
                    std::to_string(bundle.detector.model.dim));
  }

  std::vector<std::uint32_t> nominal_rows;
  std::vector<double> nominal_scores, anomaly_scores;
  for (std::size_t i = 0; i < raw.features.rows(); ++i) {
    const double s = decision_function(bundle.detector.model,
                                       raw.features.row(i));
    if (raw.labels[i] == 0) {
      nominal_scores.push_back(s);
      nominal_rows.push_back(static_cast<std::uint32_t>(i));
    } else {
      anomaly_scores.push_back(s);
    }
  }
  if (nominal_scores.empty() || anomaly_scores.empty()) {
    throw DataError("evaluation needs both nominal (0) and anomalous (1) "
                    "rows");
  }

  const RocResult roc = roc_auc(nominal_scores, anomaly_scores);
  std::cout << "auc = " << num6(roc.auc) << "\n";
  std::cout << "n_nominal = " << nominal_scores.size()
            << ", n_anomaly = " << anomaly_scores.size() << "\n";

  if (!args.alphas.empty()) {
    const NominalDataset fresh(raw.features.take_rows(nominal_rows));
    for (double alpha : args.alphas) {
      const double fa = empirical_false_alarm(bundle.detector, fresh, alpha);
      std::cout << "false_alarm[" << num(alpha) << "] = " << num6(fa) << "\n";
    }
  }

  if (!args.roc_out.empty()) {
    std::string text = "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < roc.curve.thresholds.size(); ++i) {
      text += num(roc.curve.thresholds[i]) + ',' + num(roc.curve.fpr[i]) +
              ',' + num(roc.curve.tpr[i]) + '\n';
    }
    write_text(args.roc_out, text);
    std::cout << "wrote roc curve to " << args.roc_out << "\n";
  }
}

void setup_eval(CLI::App& app) {
  auto args = std::make_shared<EvalArgs>();
  CLI::App* cmd = app.add_subcommand(
      "eval", "AUC and false-alarm rates on a labeled CSV");
  cmd->add_option("--model", args->model, "Model path")->required();
  cmd->add_option("--data", args->data,
                  "Labeled CSV (last column 0=nominal, 1=anomaly)")
      ->required();
  cmd->add_option("--alpha", args->alphas,
                  "Levels for empirical false-alarm rates")
      ->expected(-1)
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--roc-out", args->roc_out, "Optional ROC curve CSV");
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd] {
    print_resolved(*cmd);
    run_eval(*args);
  });
}

// --------------------------------------------------------------------------
// level-grid

struct GridArgs {
  std::string model;
  double x_lo = -1.0, x_hi = 9.0;
  double y_lo = -5.0, y_hi = 5.0;
  std::size_t nx = 50, ny = 50;
  std::string out;
};

void run_level_grid(const GridArgs& args) {
  const ModelBundle bundle = load_model(args.model);
  const LevelGrid grid =
      level_grid(bundle.detector.model,
                 BoundingBox{args.x_lo, args.x_hi, args.y_lo, args.y_hi},
                 args.nx, args.ny);
  std::string text = "x,y,value\n";
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      text += num(grid.xs[ix]) + ',' + num(grid.ys[iy]) + ',' +
              num(grid.values[iy * grid.nx + ix]) + '\n';
    }
  }
  write_text(args.out, text);
}

void setup_level_grid(CLI::App& app) {
  auto args = std::make_shared<GridArgs>();
  CLI::App* cmd = app.add_subcommand(
      "level-grid", "Evaluate a 2-D model on a grid for contour plots");
  cmd->add_option("--model", args->model, "Model path")->required();
  cmd->add_option("--x-lo", args->x_lo)->capture_default_str();
  cmd->add_option("--x-hi", args->x_hi)->capture_default_str();
  cmd->add_option("--y-lo", args->y_lo)->capture_default_str();
  cmd->add_option("--y-hi", args->y_hi)->capture_default_str();
  cmd->add_option("--nx", args->nx, "Grid cells along x")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ny", args->ny, "Grid cells along y")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", args->out, "Output CSV path (default: stdout)");
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd] {
    print_resolved(*cmd);
    run_level_grid(*args);
  });
}

// --------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string model;
  std::string train_data;
  std::string test_data;
  std::size_t k = 0;  // 0: use the k stored in the model
  std::size_t repeats = 5;
};

void run_bench(const BenchArgs& args) {
  const ModelBundle bundle = load_model(args.model);
  LoadedDataset train_raw = load_dataset(args.train_data, false);
  const NominalDataset train(std::move(train_raw.features));
  const LoadedDataset test_raw = load_dataset(args.test_data, false);
  const std::size_t k = args.k == 0 ? bundle.k : args.k;

  const LatencyReport report = latency_benchmark(
      bundle.detector, train, k, test_raw.features, args.repeats);
  std::cout << "detector_median_us = " << num(report.detector_median_us)
            << "\n";
  std::cout << "aklpe_median_us = " << num(report.aklpe_median_us) << "\n";
  std::cout << "support_points = " << report.support_points
            << ", support_pairs = " << report.support_pairs
            << ", n_train = " << report.n_train << ", k = " << report.k
            << ", test_points = " << report.test_points << "\n";
  for (std::size_t r = 0; r < report.repeats; ++r) {
    std::cout << "repeat " << r << ": detector=" << num(report.detector_us[r])
              << "us aklpe=" << num(report.aklpe_us[r]) << "us\n";
  }
}

void setup_bench(CLI::App& app) {
  auto args = std::make_shared<BenchArgs>();
  CLI::App* cmd = app.add_subcommand(
      "bench", "Compare per-point detection latency against the k-NN "
               "baseline");
  cmd->add_option("--model", args->model, "Model path")->required();
  cmd->add_option("--train-data", args->train_data,
                  "Training CSV (baseline scores against it)")
      ->required();
  cmd->add_option("--test-data", args->test_data, "Points to score")
      ->required();
  cmd->add_option("--k", args->k, "Baseline neighbor count (default: model k)")
      ->capture_default_str();
  cmd->add_option("--repeats", args->repeats, "Timed repeats (>= 3)")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{3}, std::size_t{1000000}));
  cmd->add_option("--config", "Read options from a key=value file");
  cmd->callback([args, cmd] {
    print_resolved(*cmd);
    run_bench(*args);
  });
}

// --------------------------------------------------------------------------
// config files
//
// CLI11 only processes set_config on the app it parses at top level, so
// subcommand config files are expanded by hand before parsing: every
// key=value line maps to the long option of the same name. Keys already
// given on the command line are dropped, which is what makes explicit
// flags beat the file.

std::string_view trim_ws(std::string_view sv) {
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) {
    sv.remove_prefix(1);
  }
  while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) {
    sv.remove_suffix(1);
  }
  return sv;
}

std::vector<std::pair<std::string, std::string>> read_config_entries(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view sv = trim_ws(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config file '" + path + "' line " +
                       std::to_string(lineno) + ": expected key=value");
    }
    const std::string key(trim_ws(sv.substr(0, eq)));
    const std::string value(trim_ws(sv.substr(eq + 1)));
    if (key.empty()) {
      throw UsageError("config file '" + path + "' line " +
                       std::to_string(lineno) + ": empty key");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

bool config_flag_value(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw UsageError("config: flag '" + key + "' wants true or false, got '" +
                   value + "'");
}

std::vector<std::string> expand_config_file(const CLI::App& app,
                                            std::vector<std::string> tokens) {
  std::size_t sub_at = tokens.size();
  const CLI::App* sub = nullptr;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (!tokens[t].empty() && tokens[t][0] != '-') {
      sub = app.get_subcommand_no_throw(tokens[t]);
      sub_at = t;
      break;
    }
  }
  if (sub == nullptr) return tokens;

  std::string path;
  for (std::size_t t = sub_at + 1; t < tokens.size(); ++t) {
    if (tokens[t] == "--config" && t + 1 < tokens.size()) {
      path = tokens[t + 1];
    } else if (tokens[t].rfind("--config=", 0) == 0) {
      path = tokens[t].substr(9);
    }
  }
  if (path.empty()) return tokens;

  for (const auto& [key, value] : read_config_entries(path)) {
    if (key == "config") throw UsageError("config files cannot nest");
    const std::string name = "--" + key;
    bool given = false;
    for (std::size_t t = sub_at + 1; t < tokens.size() && !given; ++t) {
      given = tokens[t] == name || tokens[t].rfind(name + "=", 0) == 0;
    }
    if (given) continue;
    const CLI::Option* opt = sub->get_option_no_throw(name);
    if (opt == nullptr) {
      throw UsageError("config: unknown key '" + key + "' for " +
                       sub->get_name());
    }
    if (opt->get_expected_max() == 0) {
      if (config_flag_value(key, value)) tokens.push_back(name);
    } else if (opt->get_expected_max() > 1) {
      // multi-value options take a space separated list
      tokens.push_back(name);
      std::istringstream parts{value};
      std::string part;
      while (parts >> part) tokens.push_back(part);
    } else {
      tokens.push_back(name);
      tokens.push_back(value);
    }
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ranking-based anomaly detection", "rankad"};
  app.require_subcommand(1);
  setup_synth(app);
  setup_train(app);
  setup_detect(app);
  setup_eval(app);
  setup_cv(app);
  setup_level_grid(app);
  setup_bench(app);

  try {
    std::vector<std::string> tokens(argv + 1, argv + argc);
    tokens = expand_config_file(app, std::move(tokens));
    std::reverse(tokens.begin(), tokens.end());
    app.parse(std::move(tokens));
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
