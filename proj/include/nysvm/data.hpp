#pragma once

#include "nysvm/io.hpp"
#include "nysvm/random.hpp"
#include "nysvm/types.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nysvm {

/// Raw labels listed here map to +1, every other raw label to -1.
struct BinarizeRule {
  std::vector<double> positive_raw;

  [[nodiscard]] bool is_positive(double raw) const {
    return std::find(positive_raw.begin(), positive_raw.end(), raw) !=
           positive_raw.end();
  }
};

/// Dense labeled point set. Rows of `x` are points, labels are exactly +/-1.
struct Dataset {
  std::string name;
  Matrix x;
  Vector y;

  [[nodiscard]] Index n() const { return x.rows(); }
  [[nodiscard]] Index dim() const { return x.cols(); }

  void validate() const {
    if (x.rows() != y.size())
      throw InvalidInputError("dataset: feature/label count mismatch");
    if (!x.allFinite())
      throw InvalidInputError("dataset: non-finite feature value");
    for (Index i = 0; i < y.size(); ++i)
      if (y(i) != 1.0 && y(i) != -1.0)
        throw InvalidInputError("dataset: labels must be exactly +/-1");
  }
};

namespace detail {

struct LibsvmRow {
  double label = 0.0;
  std::vector<std::pair<Index, double>> entries;
};

inline LibsvmRow parse_libsvm_line(const std::string& line, std::size_t lineno) {
  LibsvmRow row;
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  };
  const auto next_token = [&]() -> std::string {
    skip_ws();
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    return line.substr(start, pos - start);
  };

  const std::string label_token = next_token();
  if (label_token.empty()) throw ParseError(lineno, "missing label");
  row.label = parse_double(label_token, lineno);
  if (!std::isfinite(row.label)) throw ParseError(lineno, "non-finite label");

  Index prev_index = 0;
  while (true) {
    const std::string token = next_token();
    if (token.empty()) break;
    const std::size_t colon = token.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
      throw ParseError(lineno, "malformed feature entry '" + token + "'");
    const std::string index_part = token.substr(0, colon);
    long long index = 0;
    const auto res = std::from_chars(index_part.data(),
                                     index_part.data() + index_part.size(),
                                     index);
    if (res.ec != std::errc() || res.ptr != index_part.data() + index_part.size())
      throw ParseError(lineno, "invalid feature index '" + index_part + "'");
    if (index < 1) throw ParseError(lineno, "feature indices are 1-based");
    if (index <= prev_index)
      throw ParseError(lineno, "feature indices must be strictly increasing");
    const double value = parse_double(token.substr(colon + 1), lineno);
    if (!std::isfinite(value))
      throw ParseError(lineno, "non-finite feature value");
    row.entries.emplace_back(static_cast<Index>(index), value);
    prev_index = static_cast<Index>(index);
  }
  return row;
}

}  // namespace detail

/// Parses LIBSVM text. `dim_hint` sets a minimum feature dimension (indices
/// beyond it grow the dimension). Without a rule the file must contain exactly
/// two raw labels; the smaller one maps to -1.
inline Dataset parse_libsvm(std::istream& in, std::string name = "",
                            Index dim_hint = 0,
                            const std::optional<BinarizeRule>& rule = {}) {
  if (dim_hint < 0) throw InvalidInputError("parse_libsvm: negative dim_hint");
  std::vector<detail::LibsvmRow> rows;
  std::string line;
  std::size_t lineno = 0;
  Index max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(detail::parse_libsvm_line(line, lineno));
    if (!rows.back().entries.empty())
      max_index = std::max(max_index, rows.back().entries.back().first);
  }

  Dataset ds;
  ds.name = std::move(name);
  const Index n = static_cast<Index>(rows.size());
  const Index d = std::max(dim_hint, max_index);
  ds.x = Matrix::Zero(n, d);
  ds.y = Vector(n);

  std::set<double> raw_labels;
  for (Index i = 0; i < n; ++i) {
    raw_labels.insert(rows[static_cast<std::size_t>(i)].label);
    for (const auto& [index, value] : rows[static_cast<std::size_t>(i)].entries)
      ds.x(i, index - 1) = value;
  }

  if (rule.has_value()) {
    for (Index i = 0; i < n; ++i)
      ds.y(i) = rule->is_positive(rows[static_cast<std::size_t>(i)].label)
                    ? 1.0
                    : -1.0;
  } else if (n > 0) {
    if (raw_labels.size() != 2)
      throw InvalidInputError(
          "parse_libsvm: expected exactly 2 raw labels, found " +
          std::to_string(raw_labels.size()) +
          (raw_labels.size() > 2 ? "; provide a binarize rule" : ""));
    const double negative_raw = *raw_labels.begin();
    for (Index i = 0; i < n; ++i)
      ds.y(i) = rows[static_cast<std::size_t>(i)].label == negative_raw ? -1.0
                                                                        : 1.0;
  }
  ds.validate();
  return ds;
}

inline Dataset load_libsvm(const std::filesystem::path& path, Index dim_hint = 0,
                           const std::optional<BinarizeRule>& rule = {}) {
  auto in = open_input(path);
  return parse_libsvm(in, path.filename().string(), dim_hint, rule);
}

/// Writes LIBSVM text; exact zeros are left implicit.
inline void save_libsvm(std::ostream& out, const Dataset& ds) {
  ds.validate();
  for (Index i = 0; i < ds.n(); ++i) {
    out << (ds.y(i) > 0 ? "+1" : "-1");
    for (Index j = 0; j < ds.dim(); ++j)
      if (ds.x(i, j) != 0.0)
        out << ' ' << (j + 1) << ':' << format_double(ds.x(i, j));
    out << '\n';
  }
}

inline void save_libsvm(const std::filesystem::path& path, const Dataset& ds) {
  auto out = open_output(path);
  save_libsvm(out, ds);
}

/// Seeded random split into (train, test) of sizes
/// (ceil(n*(1-f)), n - ceil(n*(1-f))).
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds,
                                                 double test_fraction,
                                                 std::uint64_t seed) {
  ds.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw InvalidInputError("split_dataset: test fraction must be in (0, 1)");
  const Index n = ds.n();
  if (n < 1) throw InvalidInputError("split_dataset: empty dataset");
  // floor(n*f + 1e-9) keeps exact-intent fractions exact, so the train size
  // equals ceil(n*(1-f)) in real arithmetic.
  const auto test_n = static_cast<Index>(
      std::floor(static_cast<double>(n) * test_fraction + 1e-9));
  const Index train_n = n - test_n;

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(perm);

  const auto take = [&](Index offset, Index count, const std::string& suffix) {
    Dataset part;
    part.name = ds.name + suffix;
    part.x = Matrix(count, ds.dim());
    part.y = Vector(count);
    for (Index i = 0; i < count; ++i) {
      const Index src = perm[static_cast<std::size_t>(offset + i)];
      part.x.row(i) = ds.x.row(src);
      part.y(i) = ds.y(src);
    }
    return part;
  };
  return {take(0, train_n, "-train"), take(train_n, test_n, "-test")};
}

}  // namespace nysvm
