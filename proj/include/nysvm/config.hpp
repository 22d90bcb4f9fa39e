#pragma once

#include "nysvm/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace nysvm {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream stream(s);
  std::string part;
  while (std::getline(stream, part, ',')) {
    part = trim(part);
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

inline double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw InvalidInputError("config: bad number for " + key + ": '" + value + "'");
  }
}

inline std::int64_t to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw InvalidInputError("config: bad integer for " + key + ": '" + value + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InvalidInputError("config: bad boolean for " + key + ": '" + value + "'");
}

}  // namespace detail

/// Key-value config with [section] headers, '#' comments, and comma lists.
/// Unknown keys are rejected so typos surface immediately.
[[nodiscard]] inline ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> entries;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(lineno, "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError(lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (entries.count(full))
      throw ParseError(lineno, "duplicate key " + full);
    entries[full] = value;
  }

  ExperimentConfig cfg;
  const auto take = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string value = it->second;
    entries.erase(it);
    return value;
  };

  if (const auto v = take("data.train")) cfg.train_path = *v;
  if (const auto v = take("data.test")) cfg.test_path = *v;
  if (const auto v = take("data.test_fraction"))
    cfg.test_fraction = detail::to_double("data.test_fraction", *v);
  if (const auto v = take("data.dim_hint"))
    cfg.dim_hint = static_cast<Index>(detail::to_int("data.dim_hint", *v));
  if (const auto v = take("data.binarize")) {
    BinarizeRule rule;
    for (const auto& part : detail::split_list(*v))
      rule.positive_raw.push_back(detail::to_double("data.binarize", part));
    if (rule.positive_raw.empty())
      throw InvalidInputError("config: data.binarize lists no labels");
    cfg.binarize = rule;
  }

  if (entries.count("synth.n")) {
    SynthSpec synth;
    synth.n = static_cast<Index>(detail::to_int("synth.n", *take("synth.n")));
    if (const auto v = take("synth.d"))
      synth.d = static_cast<Index>(detail::to_int("synth.d", *v));
    if (const auto v = take("synth.decay")) {
      if (*v == "polynomial") synth.decay = DecayFamily::polynomial;
      else if (*v == "exponential") synth.decay = DecayFamily::exponential;
      else throw InvalidInputError("config: unknown synth.decay '" + *v + "'");
    }
    if (const auto v = take("synth.p")) synth.p = detail::to_double("synth.p", *v);
    if (const auto v = take("synth.beta"))
      synth.beta = detail::to_double("synth.beta", *v);
    if (const auto v = take("synth.target_norm"))
      synth.target_norm = detail::to_double("synth.target_norm", *v);
    if (const auto v = take("synth.noise"))
      synth.noise = detail::to_double("synth.noise", *v);
    if (const auto v = take("synth.margin"))
      synth.margin = detail::to_double("synth.margin", *v);
    cfg.synth = synth;
  }

  if (const auto v = take("kernel.family")) {
    if (*v == "gaussian") cfg.kernel_family = KernelFamily::gaussian;
    else if (*v == "linear") cfg.kernel_family = KernelFamily::linear;
    else if (*v == "precomputed") cfg.kernel_family = KernelFamily::precomputed;
    else throw InvalidInputError("config: unknown kernel.family '" + *v + "'");
  }
  if (const auto v = take("kernel.matrix")) cfg.kernel_matrix_path = *v;
  if (const auto v = take("kernel.sigma"))
    cfg.sigma_grid = {detail::to_double("kernel.sigma", *v)};
  if (const auto v = take("kernel.sigma_grid")) {
    cfg.sigma_grid.clear();
    for (const auto& part : detail::split_list(*v))
      cfg.sigma_grid.push_back(detail::to_double("kernel.sigma_grid", part));
  }

  if (const auto v = take("loss.family")) {
    if (*v == "hinge") cfg.loss_family = LossFamily::hinge;
    else if (*v == "logistic") cfg.loss_family = LossFamily::logistic;
    else throw InvalidInputError("config: unknown loss.family '" + *v + "'");
  }
  if (const auto v = take("loss.clip"))
    cfg.clip_m = detail::to_double("loss.clip", *v);
  if (const auto v = take("loss.clip_predictions"))
    cfg.clip_predictions = detail::to_bool("loss.clip_predictions", *v);

  if (const auto v = take("sampling.method")) {
    if (*v == "uniform") cfg.sampling = SamplingMethod::uniform;
    else if (*v == "als") cfg.sampling = SamplingMethod::als;
    else throw InvalidInputError("config: unknown sampling.method '" + *v + "'");
  }
  if (const auto v = take("sampling.alpha"))
    cfg.alpha = detail::to_double("sampling.alpha", *v);
  if (const auto v = take("sampling.pilot"))
    cfg.pilot_size = static_cast<Index>(detail::to_int("sampling.pilot", *v));

  if (const auto v = take("train.lambda"))
    cfg.lambda_grid = {detail::to_double("train.lambda", *v)};
  if (const auto v = take("train.lambda_grid")) {
    cfg.lambda_grid.clear();
    for (const auto& part : detail::split_list(*v))
      cfg.lambda_grid.push_back(detail::to_double("train.lambda_grid", part));
  }
  if (const auto v = take("train.epochs"))
    cfg.epochs = static_cast<std::uint64_t>(detail::to_int("train.epochs", *v));
  if (const auto v = take("train.constrained_radius"))
    cfg.constrained_radius = detail::to_double("train.constrained_radius", *v);

  if (const auto v = take("grid.m")) {
    cfg.m_grid.clear();
    for (const auto& part : detail::split_list(*v))
      cfg.m_grid.push_back(static_cast<Index>(detail::to_int("grid.m", part)));
  }

  if (const auto v = take("run.repeats"))
    cfg.repeats = static_cast<Index>(detail::to_int("run.repeats", *v));
  if (const auto v = take("run.seed"))
    cfg.seed = static_cast<std::uint64_t>(detail::to_int("run.seed", *v));
  if (const auto v = take("run.outdir")) cfg.outdir = *v;
  if (const auto v = take("run.workers"))
    cfg.workers = static_cast<Index>(detail::to_int("run.workers", *v));

  if (!entries.empty())
    throw InvalidInputError("config: unknown key '" + entries.begin()->first + "'");
  return cfg;
}

[[nodiscard]] inline ExperimentConfig load_config(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_config(in);
}

}  // namespace nysvm
