#pragma once

#include "nysvm/data.hpp"
#include "nysvm/diagnostics.hpp"
#include "nysvm/sampling.hpp"
#include "nysvm/solver.hpp"
#include "nysvm/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace nysvm {

/// Declarative description of a grid experiment: data source, kernel, loss,
/// sampling scheme and the (sigma, lambda, m) grid.
struct ExperimentConfig {
  // data source; a nonempty train_path wins over the synth spec
  std::string train_path;
  std::string test_path;
  double test_fraction = 0.2;
  Index dim_hint = 0;
  std::optional<BinarizeRule> binarize;
  std::optional<SynthSpec> synth;

  KernelFamily kernel_family = KernelFamily::gaussian;
  std::string kernel_matrix_path;
  std::vector<double> sigma_grid = {1.0};

  LossFamily loss_family = LossFamily::hinge;
  double clip_m = 1.0;
  bool clip_predictions = false;

  SamplingMethod sampling = SamplingMethod::als;
  double alpha = 1e-3;
  Index pilot_size = 800;

  std::vector<double> lambda_grid;
  std::vector<Index> m_grid;
  std::uint64_t epochs = 5;
  double constrained_radius = 0.0;  // > 0 switches to the constrained solver

  Index repeats = 1;
  std::uint64_t seed = 0;
  std::string outdir = ".";
  Index workers = 1;

  void validate() const {
    if (train_path.empty() && !synth.has_value())
      throw InvalidInputError("config: no dataset path and no synth section");
    if (!train_path.empty() && synth.has_value())
      throw InvalidInputError("config: both dataset path and synth section set");
    if (synth.has_value()) synth->validate();
    if (test_path.empty() && !(test_fraction > 0.0 && test_fraction < 1.0))
      throw InvalidInputError("config: test fraction must be in (0, 1)");
    if (kernel_family == KernelFamily::gaussian)
      for (const double s : sigma_grid)
        if (!(s > 0.0)) throw InvalidInputError("config: sigma must be positive");
    if (kernel_family == KernelFamily::precomputed && kernel_matrix_path.empty())
      throw InvalidInputError("config: precomputed kernel needs a matrix file");
    if (sigma_grid.empty() || lambda_grid.empty() || m_grid.empty())
      throw InvalidInputError("config: sigma, lambda and m grids must be nonempty");
    for (const double l : lambda_grid)
      if (!(l > 0.0)) throw InvalidInputError("config: lambda must be positive");
    for (const Index m : m_grid)
      if (m < 1) throw InvalidInputError("config: m must be positive");
    if (!(alpha > 0.0)) throw InvalidInputError("config: alpha must be positive");
    if (pilot_size < 1) throw InvalidInputError("config: pilot size must be >= 1");
    if (epochs < 1) throw InvalidInputError("config: epochs must be >= 1");
    if (repeats < 1) throw InvalidInputError("config: repeats must be >= 1");
    if (workers < 1) throw InvalidInputError("config: workers must be >= 1");
    if (!(clip_m > 0.0)) throw InvalidInputError("config: clip level must be > 0");
    if (constrained_radius < 0.0)
      throw InvalidInputError("config: constrained radius must be >= 0");
  }
};

/// One grid cell aggregated over repeats. Failed repeats leave their slots
/// out of the aggregates and set `status` to the first error.
struct CellResult {
  double sigma = 0.0;
  double lambda = 0.0;
  Index m = 0;
  std::vector<double> cerr;     // successful repeats, in repeat order
  std::vector<double> t_train;  // embed(train) + solve, seconds
  std::vector<double> t_pred;   // embed(test) + score, seconds
  std::vector<Index> m_eff;
  std::string status = "ok";

  [[nodiscard]] bool ok() const { return status == "ok"; }
};

struct ResultsTable {
  std::string dataset;
  SamplingMethod method = SamplingMethod::uniform;
  std::vector<CellResult> cells;  // ordered by (sigma, lambda, m) grid indices

  [[nodiscard]] bool any_failed() const {
    for (const auto& cell : cells)
      if (!cell.ok()) return true;
    return false;
  }
};

namespace stats {

[[nodiscard]] inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (const double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

/// Sample standard deviation; 0 for a single observation.
[[nodiscard]] inline double stddev(const std::vector<double>& xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (xs.size() == 1) return 0.0;
  const double m = mean(xs);
  double total = 0.0;
  for (const double x : xs) total += (x - m) * (x - m);
  return std::sqrt(total / static_cast<double>(xs.size() - 1));
}

[[nodiscard]] inline double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace stats

namespace detail {

struct RepeatOutcome {
  bool ran = false;
  bool ok = false;
  std::string error;
  double cerr = 0.0;
  double t_train = 0.0;
  double t_pred = 0.0;
  Index m_eff = 0;
};

inline double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

inline KernelSpec cell_kernel(const ExperimentConfig& cfg,
                              const std::shared_ptr<const Matrix>& gram_matrix,
                              double sigma) {
  KernelSpec spec;
  spec.family = cfg.kernel_family;
  spec.sigma = sigma;
  spec.matrix = gram_matrix;
  spec.validate();
  return spec;
}

}  // namespace detail

/// Loads (or generates) the configured train/test pair.
[[nodiscard]] inline std::pair<Dataset, Dataset> load_experiment_data(
    const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.synth.has_value()) {
    auto [ds, target] = generate(*cfg.synth);
    (void)target;
    return split_dataset(ds, cfg.test_fraction, mix_seed(cfg.seed, 0x517));
  }
  Dataset train = load_libsvm(cfg.train_path, cfg.dim_hint, cfg.binarize);
  if (!cfg.test_path.empty()) {
    Dataset test =
        load_libsvm(cfg.test_path, std::max(cfg.dim_hint, train.dim()),
                    cfg.binarize);
    if (test.dim() > train.dim()) {
      Matrix widened = Matrix::Zero(train.n(), test.dim());
      widened.leftCols(train.dim()) = train.x;
      train.x = std::move(widened);
    }
    return {std::move(train), std::move(test)};
  }
  return split_dataset(train, cfg.test_fraction, mix_seed(cfg.seed, 0x517));
}

/// Runs the full (sigma, lambda, m) x repeats grid. Cells never abort the
/// sweep; failures are recorded in their status. Deterministic for a given
/// config regardless of worker count.
[[nodiscard]] inline ResultsTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto [train, test] = load_experiment_data(cfg);
  if (test.n() < 1) throw InvalidInputError("run_experiment: empty test set");

  std::shared_ptr<const Matrix> gram_matrix;
  if (cfg.kernel_family == KernelFamily::precomputed)
    gram_matrix =
        std::make_shared<const Matrix>(load_square_matrix(cfg.kernel_matrix_path));

  const Index n_sigma = static_cast<Index>(cfg.sigma_grid.size());
  const Index n_lambda = static_cast<Index>(cfg.lambda_grid.size());
  const Index n_m = static_cast<Index>(cfg.m_grid.size());
  const Index tasks = n_sigma * n_m * cfg.repeats;

  std::vector<detail::RepeatOutcome> slots(
      static_cast<std::size_t>(tasks * n_lambda));
  const auto slot_at = [&](Index si, Index mi, Index rep, Index li)
      -> detail::RepeatOutcome& {
    const Index task = (si * n_m + mi) * cfg.repeats + rep;
    return slots[static_cast<std::size_t>(task * n_lambda + li)];
  };

  const LossSpec loss = LossSpec::make(cfg.loss_family, cfg.clip_m);

  const auto run_task = [&](Index task_index) {
    const Index rep = task_index % cfg.repeats;
    const Index mi = (task_index / cfg.repeats) % n_m;
    const Index si = task_index / (cfg.repeats * n_m);
    const double sigma = cfg.sigma_grid[static_cast<std::size_t>(si)];
    const Index m = cfg.m_grid[static_cast<std::size_t>(mi)];
    const std::uint64_t base_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(si),
                                             static_cast<std::uint64_t>(mi),
                                             static_cast<std::uint64_t>(rep));
    const auto fail_all = [&](const std::string& message) {
      for (Index li = 0; li < n_lambda; ++li) {
        auto& slot = slot_at(si, mi, rep, li);
        slot.ran = true;
        slot.ok = false;
        slot.error = message;
      }
    };
    try {
      const KernelSpec spec = detail::cell_kernel(cfg, gram_matrix, sigma);
      const auto t_embed_start = std::chrono::steady_clock::now();
      const LandmarkSet landmarks =
          sample_landmarks(train, spec, cfg.sampling, m, cfg.alpha,
                           cfg.pilot_size, mix_seed(base_seed, 1));
      const NystromMap map = fit_embedding(train, spec, landmarks);
      const Matrix embedded_train = embed(map, train);
      const double t_embed_train = detail::seconds_since(t_embed_start);

      const auto t_test_start = std::chrono::steady_clock::now();
      const Matrix embedded_test = embed(map, test);
      const double t_embed_test = detail::seconds_since(t_test_start);

      for (Index li = 0; li < n_lambda; ++li) {
        auto& slot = slot_at(si, mi, rep, li);
        slot.ran = true;
        try {
          const double lambda = cfg.lambda_grid[static_cast<std::size_t>(li)];
          TrainOptions opt;
          opt.epochs = cfg.epochs;
          opt.seed = mix_seed(base_seed, 2, static_cast<std::uint64_t>(li));

          const auto t_train_start = std::chrono::steady_clock::now();
          TrainedModel model =
              cfg.constrained_radius > 0.0
                  ? train_constrained(embedded_train, train.y, loss,
                                      cfg.constrained_radius, opt)
                  : train_penalized(embedded_train, train.y, loss, lambda, opt);
          const double t_solve = detail::seconds_since(t_train_start);

          const auto t_pred_start = std::chrono::steady_clock::now();
          Vector scores = decision_scores(model, embedded_test);
          if (cfg.clip_predictions)
            for (Index i = 0; i < scores.size(); ++i)
              scores(i) = clip_score(scores(i), loss.clip_m);
          const double cerr = classification_error(scores, test.y);
          const double t_score = detail::seconds_since(t_pred_start);

          slot.ok = true;
          slot.cerr = cerr;
          slot.t_train = t_embed_train + t_solve;
          slot.t_pred = t_embed_test + t_score;
          slot.m_eff = landmarks.effective_size();
        } catch (const std::exception& e) {
          slot.ok = false;
          slot.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      fail_all(e.what());
    }
  };

  const Index worker_count = std::min<Index>(cfg.workers, tasks);
  if (worker_count <= 1) {
    for (Index t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<Index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (Index w = 0; w < worker_count; ++w)
      pool.emplace_back([&] {
        while (true) {
          const Index t = next.fetch_add(1);
          if (t >= tasks) break;
          run_task(t);
        }
      });
    for (auto& thread : pool) thread.join();
  }

  ResultsTable table;
  table.dataset = train.name;
  table.method = cfg.sampling;
  table.cells.reserve(
      static_cast<std::size_t>(n_sigma * n_lambda * n_m));
  for (Index si = 0; si < n_sigma; ++si)
    for (Index li = 0; li < n_lambda; ++li)
      for (Index mi = 0; mi < n_m; ++mi) {
        CellResult cell;
        cell.sigma = cfg.sigma_grid[static_cast<std::size_t>(si)];
        cell.lambda = cfg.lambda_grid[static_cast<std::size_t>(li)];
        cell.m = cfg.m_grid[static_cast<std::size_t>(mi)];
        for (Index rep = 0; rep < cfg.repeats; ++rep) {
          const auto& slot = slot_at(si, mi, rep, li);
          if (slot.ok) {
            cell.cerr.push_back(slot.cerr);
            cell.t_train.push_back(slot.t_train);
            cell.t_pred.push_back(slot.t_pred);
            cell.m_eff.push_back(slot.m_eff);
          } else if (cell.status == "ok") {
            cell.status = "error: " + slot.error;
          }
        }
        table.cells.push_back(std::move(cell));
      }
  return table;
}

namespace detail {

inline std::string format_seconds(double seconds) {
  if (std::isnan(seconds)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", seconds);
  return buf;
}

inline std::string csv_stat(double value) {
  return std::isnan(value) ? "nan" : format_double(value);
}

}  // namespace detail

/// Table-2-style rows; timing columns carry wall-clock noise and are excluded
/// from determinism guarantees.
inline void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << "dataset,method,sigma,lambda,m,cerr_mean,cerr_std,"
         "t_train_mean,t_train_std,t_pred_mean,t_pred_std,status\n";
  for (const auto& cell : table.cells) {
    out << table.dataset << ',' << to_string(table.method) << ','
        << format_double(cell.sigma) << ',' << format_double(cell.lambda) << ','
        << cell.m << ',' << detail::csv_stat(stats::mean(cell.cerr)) << ','
        << detail::csv_stat(stats::stddev(cell.cerr)) << ','
        << detail::format_seconds(stats::mean(cell.t_train)) << ','
        << detail::format_seconds(stats::stddev(cell.t_train)) << ','
        << detail::format_seconds(stats::mean(cell.t_pred)) << ','
        << detail::format_seconds(stats::stddev(cell.t_pred)) << ','
        << (cell.ok() ? "ok" : "\"" + cell.status + "\"") << '\n';
  }
}

inline void write_summary_json(std::ostream& out, const ExperimentConfig& cfg,
                               const ResultsTable& table) {
  nlohmann::ordered_json summary;
  summary["dataset"] = table.dataset;
  summary["method"] = to_string(table.method);
  summary["kernel"] = to_string(cfg.kernel_family);
  summary["loss"] = to_string(cfg.loss_family);
  summary["alpha"] = cfg.alpha;
  summary["pilot_size"] = cfg.pilot_size;
  summary["epochs"] = cfg.epochs;
  summary["repeats"] = cfg.repeats;
  summary["seed"] = cfg.seed;
  summary["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : table.cells) {
    nlohmann::ordered_json row;
    row["sigma"] = cell.sigma;
    row["lambda"] = cell.lambda;
    row["m"] = cell.m;
    row["m_eff"] = cell.m_eff;
    row["cerr"] = cell.cerr;
    row["cerr_mean"] = stats::mean(cell.cerr);
    row["cerr_std"] = stats::stddev(cell.cerr);
    row["t_train_mean"] = stats::mean(cell.t_train);
    row["t_pred_mean"] = stats::mean(cell.t_pred);
    row["status"] = cell.status;
    summary["cells"].push_back(std::move(row));
  }
  summary["any_failed"] = table.any_failed();
  out << summary.dump(2) << '\n';
}

/// Heatmap over lambda (rows) x m (columns) at a single sigma; writes one grid
/// of c-err means and one of stds.
inline ResultsTable sweep_heatmap(const ExperimentConfig& cfg,
                                  std::ostream& mean_out,
                                  std::ostream& std_out) {
  cfg.validate();
  if (cfg.sigma_grid.size() != 1)
    throw InvalidInputError("sweep_heatmap: exactly one sigma required");
  if (cfg.lambda_grid.size() < 2 || cfg.m_grid.size() < 2)
    throw InvalidInputError("sweep_heatmap: lambda and m grids need length >= 2");
  const ResultsTable table = run_experiment(cfg);

  const auto write_grid = [&](std::ostream& out, const bool want_mean) {
    out << "lambda\\m";
    for (const Index m : cfg.m_grid) out << ',' << m;
    out << '\n';
    std::size_t cell_index = 0;
    for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
      out << format_double(cfg.lambda_grid[li]);
      for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi, ++cell_index) {
        const CellResult& cell = table.cells[cell_index];
        const double value = want_mean ? stats::mean(cell.cerr)
                                       : stats::stddev(cell.cerr);
        out << ',' << detail::csv_stat(value);
      }
      out << '\n';
    }
  };
  write_grid(mean_out, true);
  write_grid(std_out, false);
  return table;
}

}  // namespace nysvm
