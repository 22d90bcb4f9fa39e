#include "nysvm/nysvm.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nysvm::Index;
using nysvm::Matrix;
using nysvm::Vector;

struct DataArgs {
  std::string train_path;
  std::string test_path;
  double test_fraction = 0.2;
  Index dim_hint = 0;
  std::string binarize;
};

void add_data_options(CLI::App* cmd, DataArgs& args, bool with_test = true) {
  cmd->add_option("--train", args.train_path, "training set (LIBSVM text)")
      ->required();
  if (with_test) {
    cmd->add_option("--test", args.test_path, "test set (LIBSVM text)");
    cmd->add_option("--test-fraction", args.test_fraction,
                    "held-out fraction when --test is absent");
  }
  cmd->add_option("--dim-hint", args.dim_hint, "minimum feature dimension");
  cmd->add_option("--binarize", args.binarize,
                  "comma list of raw labels mapped to +1");
}

std::optional<nysvm::BinarizeRule> binarize_rule(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  nysvm::BinarizeRule rule;
  for (const auto& part : nysvm::detail::split_list(spec))
    rule.positive_raw.push_back(nysvm::detail::to_double("--binarize", part));
  return rule;
}

struct KernelArgs {
  std::string family = "gaussian";
  double sigma = 1.0;
  std::string matrix_path;
};

void add_kernel_options(CLI::App* cmd, KernelArgs& args) {
  cmd->add_option("--kernel", args.family, "gaussian | linear | precomputed")
      ->check(CLI::IsMember({"gaussian", "linear", "precomputed"}));
  cmd->add_option("--sigma", args.sigma, "gaussian bandwidth");
  cmd->add_option("--kernel-matrix", args.matrix_path,
                  "precomputed Gram matrix file (binary or CSV)");
}

nysvm::KernelSpec kernel_spec(const KernelArgs& args) {
  if (args.family == "linear") return nysvm::KernelSpec::linear();
  if (args.family == "precomputed") {
    if (args.matrix_path.empty())
      throw nysvm::InvalidInputError("precomputed kernel needs --kernel-matrix");
    return nysvm::KernelSpec::precomputed(
        nysvm::load_square_matrix(args.matrix_path));
  }
  return nysvm::KernelSpec::gaussian(args.sigma);
}

std::vector<double> parse_real_list(const std::string& name,
                                    const std::string& joined) {
  std::vector<double> values;
  for (const auto& part : nysvm::detail::split_list(joined))
    values.push_back(nysvm::detail::to_double(name, part));
  if (values.empty())
    throw nysvm::InvalidInputError(name + ": empty list");
  return values;
}

void write_scores_csv(const std::string& path, const Vector& scores) {
  auto out = nysvm::open_output(path);
  out << "index,score\n";
  for (Index i = 0; i < scores.size(); ++i)
    out << i << ',' << nysvm::format_double(scores(i)) << '\n';
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

int run_train(const DataArgs& data_args, const KernelArgs& kernel_args,
              const std::string& sampling, double alpha, Index pilot_size,
              Index m, const std::string& loss_name, double clip_level,
              double lambda, std::uint64_t epochs, double constrained_radius,
              bool clip, std::uint64_t seed, const std::string& model_out,
              const std::string& scores_out) {
  const auto rule = binarize_rule(data_args.binarize);
  nysvm::Dataset train =
      nysvm::load_libsvm(data_args.train_path, data_args.dim_hint, rule);
  nysvm::Dataset test;
  if (!data_args.test_path.empty()) {
    test = nysvm::load_libsvm(data_args.test_path,
                              std::max(data_args.dim_hint, train.dim()), rule);
    if (test.dim() > train.dim()) {
      Matrix widened = Matrix::Zero(train.n(), test.dim());
      widened.leftCols(train.dim()) = train.x;
      train.x = std::move(widened);
    }
  } else {
    auto parts = nysvm::split_dataset(train, data_args.test_fraction,
                                      nysvm::mix_seed(seed, 0x517));
    train = std::move(parts.first);
    test = std::move(parts.second);
  }

  const nysvm::KernelSpec spec = kernel_spec(kernel_args);
  const nysvm::SamplingMethod method = sampling == "uniform"
                                           ? nysvm::SamplingMethod::uniform
                                           : nysvm::SamplingMethod::als;
  const nysvm::LossSpec loss = nysvm::LossSpec::make(
      loss_name == "hinge" ? nysvm::LossFamily::hinge
                           : nysvm::LossFamily::logistic,
      clip_level);

  const auto t_train_start = std::chrono::steady_clock::now();
  const nysvm::LandmarkSet landmarks = nysvm::sample_landmarks(
      train, spec, method, m, alpha, pilot_size, nysvm::mix_seed(seed, 1));
  auto map = std::make_shared<nysvm::NystromMap>(
      nysvm::fit_embedding(train, spec, landmarks));
  const Matrix embedded_train = nysvm::embed(*map, train);

  nysvm::TrainOptions opt;
  opt.epochs = epochs;
  opt.seed = nysvm::mix_seed(seed, 2);
  nysvm::TrainedModel model =
      constrained_radius > 0.0
          ? nysvm::train_constrained(embedded_train, train.y, loss,
                                     constrained_radius, opt)
          : nysvm::train_penalized(embedded_train, train.y, loss, lambda, opt);
  model.map = map;
  const double t_train = seconds_since(t_train_start);

  const auto t_pred_start = std::chrono::steady_clock::now();
  const Vector scores = nysvm::predict_scores(model, test, clip);
  const double cerr = nysvm::classification_error(scores, test.y);
  const double risk = nysvm::empirical_risk(loss, scores, test.y, false);
  const double t_pred = seconds_since(t_pred_start);

  std::cout << "dataset: " << train.name << "\n"
            << "n_train: " << train.n() << "  n_test: " << test.n() << "\n"
            << "sampling: " << nysvm::to_string(method)
            << "  m_requested: " << m
            << "  m_eff: " << landmarks.effective_size()
            << "  rank: " << map->rank() << "\n"
            << "objective: " << nysvm::format_double(model.final_objective)
            << "\n"
            << "test_cerr: " << nysvm::format_double(cerr) << "\n"
            << "test_risk: " << nysvm::format_double(risk) << "\n"
            << "t_train: " << nysvm::detail::format_seconds(t_train)
            << "  t_pred: " << nysvm::detail::format_seconds(t_pred) << "\n";

  if (!model_out.empty()) {
    nysvm::save_model(model_out, model);
    std::cout << "model written to " << model_out << "\n";
  }
  if (!scores_out.empty()) {
    write_scores_csv(scores_out, scores);
    std::cout << "scores written to " << scores_out << "\n";
  }
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             Index dim_hint, const std::string& binarize,
             const std::string& kernel_matrix, bool clip,
             const std::string& scores_out) {
  nysvm::TrainedModel model = nysvm::load_model(model_path);
  if (!kernel_matrix.empty()) {
    auto map = std::make_shared<nysvm::NystromMap>(*model.map);
    map->spec.matrix = std::make_shared<const Matrix>(
        nysvm::load_square_matrix(kernel_matrix));
    map->spec.validate();
    model.map = map;
  }
  const nysvm::Dataset data =
      nysvm::load_libsvm(data_path, dim_hint, binarize_rule(binarize));
  const Vector scores = nysvm::predict_scores(model, data, clip);
  const double cerr = nysvm::classification_error(scores, data.y);
  const double risk = nysvm::empirical_risk(model.loss, scores, data.y, false);
  std::cout << "n: " << data.n() << "\n"
            << "cerr: " << nysvm::format_double(cerr) << "\n"
            << "risk: " << nysvm::format_double(risk) << "\n";
  if (!scores_out.empty()) {
    write_scores_csv(scores_out, scores);
    std::cout << "scores written to " << scores_out << "\n";
  }
  return 0;
}

void apply_overrides(nysvm::ExperimentConfig& cfg, const std::string& outdir,
                     std::optional<std::uint64_t> seed,
                     std::optional<Index> repeats,
                     std::optional<Index> workers) {
  if (!outdir.empty()) cfg.outdir = outdir;
  if (seed) cfg.seed = *seed;
  if (repeats) cfg.repeats = *repeats;
  if (workers) cfg.workers = *workers;
}

int run_sweep(const nysvm::ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.outdir);
  const nysvm::ResultsTable table = nysvm::run_experiment(cfg);
  const auto results_path = std::filesystem::path(cfg.outdir) / "results.csv";
  const auto summary_path = std::filesystem::path(cfg.outdir) / "summary.json";
  {
    auto out = nysvm::open_output(results_path);
    nysvm::write_results_csv(out, table);
  }
  {
    auto out = nysvm::open_output(summary_path);
    nysvm::write_summary_json(out, cfg, table);
  }
  std::cout << "wrote " << results_path.string() << "\n"
            << "wrote " << summary_path.string() << "\n";
  if (table.any_failed()) {
    std::cerr << "some cells failed; see status column\n";
    return 1;
  }
  return 0;
}

int run_heatmap(const nysvm::ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.outdir);
  const auto mean_path =
      std::filesystem::path(cfg.outdir) / "heatmap_cerr_mean.csv";
  const auto std_path =
      std::filesystem::path(cfg.outdir) / "heatmap_cerr_std.csv";
  const auto summary_path = std::filesystem::path(cfg.outdir) / "summary.json";
  auto mean_out = nysvm::open_output(mean_path);
  auto std_out = nysvm::open_output(std_path);
  const nysvm::ResultsTable table = nysvm::sweep_heatmap(cfg, mean_out, std_out);
  {
    auto out = nysvm::open_output(summary_path);
    nysvm::write_summary_json(out, cfg, table);
  }
  std::cout << "wrote " << mean_path.string() << "\n"
            << "wrote " << std_path.string() << "\n"
            << "wrote " << summary_path.string() << "\n";
  if (table.any_failed()) {
    std::cerr << "some cells failed; see summary.json\n";
    return 1;
  }
  return 0;
}

int run_diagnose(const DataArgs& data_args, const KernelArgs& kernel_args,
                 const std::string& alphas, Index m_override, Index pilot_size,
                 Index max_points, const std::string& regime_name, double r,
                 double theta, std::uint64_t seed, const std::string& outdir) {
  const auto rule = binarize_rule(data_args.binarize);
  nysvm::Dataset data =
      nysvm::load_libsvm(data_args.train_path, data_args.dim_hint, rule);
  if (data.n() > max_points) {
    const nysvm::LandmarkSet keep =
        nysvm::uniform_landmarks(data.n(), max_points, nysvm::mix_seed(seed, 9));
    Matrix x(max_points, data.dim());
    Vector y(max_points);
    for (Index i = 0; i < max_points; ++i) {
      x.row(i) = data.x.row(keep.indices[static_cast<std::size_t>(i)]);
      y(i) = data.y(keep.indices[static_cast<std::size_t>(i)]);
    }
    data.x = std::move(x);
    data.y = std::move(y);
    data.name += "-sub" + std::to_string(max_points);
  }

  const nysvm::KernelSpec spec = kernel_spec(kernel_args);
  const Matrix k = nysvm::gram(spec, data.x);
  const nysvm::SpectrumReport report = nysvm::fit_eigendecay_from_gram(k);

  nysvm::SizeRegime regime = nysvm::SizeRegime::basic();
  if (regime_name == "fast") regime = nysvm::SizeRegime::fast();
  else if (regime_name == "general") regime = nysvm::SizeRegime::general(r, theta);
  const Index m_suggested = nysvm::suggest_subspace_size(data.n(), report, regime);

  std::filesystem::create_directories(outdir);
  const auto csv_path = std::filesystem::path(outdir) / "diagnostics.csv";
  const auto json_path = std::filesystem::path(outdir) / "diagnostics.json";
  const auto spectrum_path = std::filesystem::path(outdir) / "spectrum.csv";

  nlohmann::ordered_json summary;
  summary["dataset"] = data.name;
  summary["n"] = data.n();
  summary["kernel"] = nysvm::to_string(spec.family);
  if (spec.family == nysvm::KernelFamily::gaussian) summary["sigma"] = spec.sigma;
  summary["decay_family"] = nysvm::to_string(report.decay.family);
  summary["p"] = report.decay.p;
  summary["beta"] = report.decay.beta;
  summary["gamma"] = report.decay.gamma;
  summary["fit_residual"] = report.decay.residual;
  summary["regime"] = regime_name;
  summary["m_suggested"] = m_suggested;
  summary["alphas"] = nlohmann::ordered_json::array();

  auto csv = nysvm::open_output(csv_path);
  csv << "alpha,d2,dinf,dim_bound,m,m_eff,residual,three_alpha\n";
  for (const double alpha : parse_real_list("--alphas", alphas)) {
    const double d2 = nysvm::effective_dim_2(k, alpha);
    const double dinf = nysvm::effective_dim_inf(k, alpha);
    const double bound = nysvm::dimension_bound(report.decay, alpha);
    const Index m = m_override > 0 ? m_override : m_suggested;
    const nysvm::LandmarkSet landmarks = nysvm::sample_landmarks(
        data, spec, nysvm::SamplingMethod::als, m, alpha,
        std::min(pilot_size, data.n()), nysvm::mix_seed(seed, 1));
    const double residual = nysvm::projection_residual(data, spec, landmarks);
    csv << nysvm::format_double(alpha) << ',' << nysvm::format_double(d2) << ','
        << nysvm::format_double(dinf) << ',' << nysvm::format_double(bound)
        << ',' << m << ',' << landmarks.effective_size() << ','
        << nysvm::format_double(residual) << ','
        << nysvm::format_double(3.0 * alpha) << '\n';

    nlohmann::ordered_json row;
    row["alpha"] = alpha;
    row["d2"] = d2;
    row["dinf"] = dinf;
    row["dim_bound"] = bound;
    row["m"] = m;
    row["m_eff"] = landmarks.effective_size();
    row["residual"] = residual;
    row["three_alpha"] = 3.0 * alpha;
    summary["alphas"].push_back(std::move(row));
  }

  {
    auto out = nysvm::open_output(spectrum_path);
    out << "rank,eigenvalue\n";
    for (Index j = 0; j < report.eigenvalues.size(); ++j)
      out << (j + 1) << ',' << nysvm::format_double(report.eigenvalues(j))
          << '\n';
  }
  {
    auto out = nysvm::open_output(json_path);
    out << summary.dump(2) << '\n';
  }
  std::cout << "wrote " << csv_path.string() << "\n"
            << "wrote " << spectrum_path.string() << "\n"
            << "wrote " << json_path.string() << "\n";
  return 0;
}

int run_synth(Index n, Index d, const std::string& decay, double p, double beta,
              double target_norm, double noise, double margin,
              std::uint64_t seed, const std::string& out_path,
              const std::string& target_out) {
  nysvm::SynthSpec spec;
  spec.n = n;
  spec.d = d;
  spec.decay = decay == "exponential" ? nysvm::DecayFamily::exponential
                                      : nysvm::DecayFamily::polynomial;
  spec.p = p;
  spec.beta = beta;
  spec.target_norm = target_norm;
  spec.noise = noise;
  spec.margin = margin;
  spec.seed = seed;
  const auto [ds, target] = nysvm::generate(spec);
  nysvm::save_libsvm(out_path, ds);
  std::cout << "wrote " << out_path << " (" << ds.n() << " x " << ds.dim()
            << ")\n";
  if (!target_out.empty()) {
    auto out = nysvm::open_output(target_out);
    for (Index j = 0; j < target.size(); ++j)
      out << nysvm::format_double(target(j)) << '\n';
    std::cout << "wrote " << target_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom subspace ERM: training, sweeps, and diagnostics"};
  app.require_subcommand(1);

  // train
  DataArgs train_data;
  KernelArgs train_kernel;
  std::string train_sampling = "als";
  double train_alpha = 1e-3;
  Index train_pilot = 800;
  Index train_m = 0;
  std::string train_loss = "hinge";
  double train_clip_level = 1.0;
  double train_lambda = 1e-5;
  std::uint64_t train_epochs = 5;
  double train_radius = 0.0;
  bool train_clip = false;
  std::uint64_t train_seed = 0;
  std::string train_model_out;
  std::string train_scores_out;
  auto* train_cmd = app.add_subcommand("train", "train one model");
  add_data_options(train_cmd, train_data);
  add_kernel_options(train_cmd, train_kernel);
  train_cmd->add_option("--sampling", train_sampling, "uniform | als")
      ->check(CLI::IsMember({"uniform", "als"}));
  train_cmd->add_option("--alpha", train_alpha, "leverage-score regularization");
  train_cmd->add_option("--pilot-size", train_pilot, "ALS pilot landmark count");
  train_cmd->add_option("--m", train_m, "landmark count")->required();
  train_cmd->add_option("--loss", train_loss, "hinge | logistic")
      ->check(CLI::IsMember({"hinge", "logistic"}));
  train_cmd->add_option("--clip-level", train_clip_level, "clipping level M");
  train_cmd->add_option("--lambda", train_lambda, "ridge penalty");
  train_cmd->add_option("--epochs", train_epochs, "passes over the data");
  train_cmd->add_option("--constrained-radius", train_radius,
                        "> 0 trains with the norm-constrained solver");
  train_cmd->add_flag("--clip", train_clip, "clip prediction scores to [-M, M]");
  train_cmd->add_option("--seed", train_seed, "random seed");
  train_cmd->add_option("--model-out", train_model_out, "model output path");
  train_cmd->add_option("--scores-out", train_scores_out,
                        "test scores CSV output path");

  // eval
  std::string eval_model, eval_data, eval_binarize, eval_kernel_matrix,
      eval_scores_out;
  Index eval_dim_hint = 0;
  bool eval_clip = false;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model");
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--data", eval_data, "LIBSVM data file")->required();
  eval_cmd->add_option("--dim-hint", eval_dim_hint, "minimum feature dimension");
  eval_cmd->add_option("--binarize", eval_binarize,
                       "comma list of raw labels mapped to +1");
  eval_cmd->add_option("--kernel-matrix", eval_kernel_matrix,
                       "reattach precomputed Gram matrix");
  eval_cmd->add_flag("--clip", eval_clip, "clip prediction scores to [-M, M]");
  eval_cmd->add_option("--scores-out", eval_scores_out, "scores CSV output path");

  // sweep / heatmap
  std::string sweep_config, sweep_outdir;
  std::optional<std::uint64_t> sweep_seed;
  std::optional<Index> sweep_repeats, sweep_workers;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a config-driven grid");
  sweep_cmd->add_option("--config", sweep_config, "experiment config file")
      ->required();
  sweep_cmd->add_option("--outdir", sweep_outdir, "override output directory");
  sweep_cmd->add_option("--seed", sweep_seed, "override base seed");
  sweep_cmd->add_option("--repeats", sweep_repeats, "override repeat count");
  sweep_cmd->add_option("--workers", sweep_workers, "override worker count");

  std::string heatmap_config, heatmap_outdir;
  std::optional<std::uint64_t> heatmap_seed;
  std::optional<Index> heatmap_repeats, heatmap_workers;
  auto* heatmap_cmd =
      app.add_subcommand("heatmap", "lambda x m error grid at fixed sigma");
  heatmap_cmd->add_option("--config", heatmap_config, "experiment config file")
      ->required();
  heatmap_cmd->add_option("--outdir", heatmap_outdir, "override output directory");
  heatmap_cmd->add_option("--seed", heatmap_seed, "override base seed");
  heatmap_cmd->add_option("--repeats", heatmap_repeats, "override repeat count");
  heatmap_cmd->add_option("--workers", heatmap_workers, "override worker count");

  // diagnose
  DataArgs diag_data;
  KernelArgs diag_kernel;
  std::string diag_alphas = "1e-4,1e-3,1e-2";
  Index diag_m = 0;
  Index diag_pilot = 800;
  Index diag_max_points = 2000;
  std::string diag_regime = "basic";
  double diag_r = 1.0;
  double diag_theta = 1.0;
  std::uint64_t diag_seed = 0;
  std::string diag_outdir = "diagnostics";
  auto* diag_cmd = app.add_subcommand(
      "diagnose", "effective dimensions, decay fit, projection residuals");
  add_data_options(diag_cmd, diag_data, /*with_test=*/false);
  add_kernel_options(diag_cmd, diag_kernel);
  diag_cmd->add_option("--alphas", diag_alphas, "comma list of alpha values");
  diag_cmd->add_option("--m", diag_m, "landmark count (0 = suggested)");
  diag_cmd->add_option("--pilot-size", diag_pilot, "ALS pilot landmark count");
  diag_cmd->add_option("--max-points", diag_max_points,
                       "subsample cap before forming the Gram matrix");
  diag_cmd->add_option("--regime", diag_regime, "basic | fast | general")
      ->check(CLI::IsMember({"basic", "fast", "general"}));
  diag_cmd->add_option("--r", diag_r, "source-condition exponent (general)");
  diag_cmd->add_option("--theta", diag_theta, "Bernstein exponent (general)");
  diag_cmd->add_option("--seed", diag_seed, "random seed");
  diag_cmd->add_option("--outdir", diag_outdir, "output directory");

  // synth
  Index synth_n = 1000;
  Index synth_d = 50;
  std::string synth_decay = "polynomial";
  double synth_p = 0.5;
  double synth_beta = 1.0;
  double synth_target_norm = 1.0;
  double synth_noise = 0.0;
  double synth_margin = 0.0;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "synth.libsvm";
  std::string synth_target_out;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic LIBSVM dataset");
  synth_cmd->add_option("--n", synth_n, "sample count");
  synth_cmd->add_option("--d", synth_d, "feature dimension");
  synth_cmd->add_option("--decay", synth_decay, "polynomial | exponential")
      ->check(CLI::IsMember({"polynomial", "exponential"}));
  synth_cmd->add_option("--p", synth_p, "polynomial decay exponent, in (0,1)");
  synth_cmd->add_option("--beta", synth_beta, "exponential decay rate");
  synth_cmd->add_option("--target-norm", synth_target_norm, "||w*||");
  synth_cmd->add_option("--noise", synth_noise, "label flip probability");
  synth_cmd->add_option("--margin", synth_margin,
                        "reject points with |<w*,x>| below this");
  synth_cmd->add_option("--seed", synth_seed, "random seed");
  synth_cmd->add_option("--out", synth_out, "output LIBSVM path");
  synth_cmd->add_option("--target-out", synth_target_out,
                        "write w* as one value per line");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed())
      return run_train(train_data, train_kernel, train_sampling, train_alpha,
                       train_pilot, train_m, train_loss, train_clip_level,
                       train_lambda, train_epochs, train_radius, train_clip,
                       train_seed, train_model_out, train_scores_out);
    if (eval_cmd->parsed())
      return run_eval(eval_model, eval_data, eval_dim_hint, eval_binarize,
                      eval_kernel_matrix, eval_clip, eval_scores_out);
    if (sweep_cmd->parsed()) {
      nysvm::ExperimentConfig cfg = nysvm::load_config(sweep_config);
      apply_overrides(cfg, sweep_outdir, sweep_seed, sweep_repeats,
                      sweep_workers);
      return run_sweep(cfg);
    }
    if (heatmap_cmd->parsed()) {
      nysvm::ExperimentConfig cfg = nysvm::load_config(heatmap_config);
      apply_overrides(cfg, heatmap_outdir, heatmap_seed, heatmap_repeats,
                      heatmap_workers);
      return run_heatmap(cfg);
    }
    if (diag_cmd->parsed())
      return run_diagnose(diag_data, diag_kernel, diag_alphas, diag_m,
                          diag_pilot, diag_max_points, diag_regime, diag_r,
                          diag_theta, diag_seed, diag_outdir);
    if (synth_cmd->parsed())
      return run_synth(synth_n, synth_d, synth_decay, synth_p, synth_beta,
                       synth_target_norm, synth_noise, synth_margin, synth_seed,
                       synth_out, synth_target_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
