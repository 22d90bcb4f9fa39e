#pragma once

#include "nysvm/nysvm.hpp"

#include <cstdint>
#include <vector>

namespace testutil {

using nysvm::Index;
using nysvm::Matrix;
using nysvm::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  nysvm::Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(Index n, std::uint64_t seed) {
  nysvm::Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

/// Full-rank random PSD matrix B*B^T/n.
inline Matrix random_psd(Index n, std::uint64_t seed) {
  const Matrix b = random_matrix(n, n, seed);
  return b * b.transpose() / static_cast<double>(n);
}

/// Labeled Gaussian blob dataset with two linearly separated-ish classes.
inline nysvm::Dataset random_dataset(Index n, Index d, std::uint64_t seed) {
  nysvm::Dataset ds;
  ds.name = "random";
  ds.x = random_matrix(n, d, seed);
  ds.y = Vector(n);
  nysvm::Rng rng(nysvm::mix_seed(seed, 77));
  for (Index i = 0; i < n; ++i) ds.y(i) = rng.unit_double() < 0.5 ? -1.0 : 1.0;
  return ds;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
