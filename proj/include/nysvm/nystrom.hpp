#pragma once

#include "nysvm/data.hpp"
#include "nysvm/kernel.hpp"
#include "nysvm/types.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace nysvm {

/// Finite-dimensional feature map built from m landmark points: a point x is
/// sent to pinv(Km^{1/2}) * (K(landmark_1, x), ..., K(landmark_m, x)).
/// Eigenvalues of Km at or below tol * lambda_max are dropped, so the
/// embedding dimension is the retained rank r <= m.
struct NystromMap {
  KernelSpec spec;
  Matrix landmark_points;        // m x d
  std::vector<Index> landmark_indices;
  Vector eigenvalues;            // kept eigenvalues of Km, descending
  Matrix factor;                 // r x m, diag(eigenvalues^{-1/2}) * U_r^T
  double tol = 1e-12;

  [[nodiscard]] Index landmark_count() const { return landmark_points.rows(); }
  [[nodiscard]] Index rank() const { return factor.rows(); }
};

/// Diagonalizes the landmark Gram matrix and forms the embedding factor.
[[nodiscard]] inline NystromMap fit_embedding(const Dataset& ds,
                                              const KernelSpec& spec,
                                              const std::vector<Index>& landmarks,
                                              double tol = 1e-12) {
  ds.validate();
  spec.validate();
  if (landmarks.empty())
    throw InvalidInputError("fit_embedding: landmark set is empty");
  if (!(tol >= 0.0 && tol < 1.0))
    throw InvalidInputError("fit_embedding: tol must be in [0, 1)");
  const Index n = ds.n();
  for (const Index i : landmarks)
    if (i < 0 || i >= n)
      throw InvalidInputError("fit_embedding: landmark index out of range");

  NystromMap map;
  map.spec = spec;
  map.landmark_indices = landmarks;
  map.tol = tol;
  const auto m = static_cast<Index>(landmarks.size());
  map.landmark_points = Matrix(m, ds.dim());
  for (Index i = 0; i < m; ++i)
    map.landmark_points.row(i) = ds.x.row(landmarks[static_cast<std::size_t>(i)]);

  const Matrix km = gram(spec, map.landmark_points);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(km);
  if (eig.info() != Eigen::Success)
    throw NumericalDomainError("fit_embedding: eigendecomposition failed");

  const Vector& values = eig.eigenvalues();  // ascending
  const double lambda_max = std::max(values(m - 1), 0.0);
  if (values(0) < -1e-8 * std::max(lambda_max, 1e-300))
    throw NumericalDomainError(
        "fit_embedding: landmark Gram matrix is not positive semidefinite");

  const double cutoff = tol * lambda_max;
  Index rank = 0;
  for (Index i = 0; i < m; ++i)
    if (values(i) > cutoff) ++rank;

  map.eigenvalues = Vector(rank);
  map.factor = Matrix(rank, m);
  for (Index k = 0; k < rank; ++k) {
    const Index src = m - 1 - k;  // descending order
    map.eigenvalues(k) = values(src);
    map.factor.row(k) =
        eig.eigenvectors().col(src).transpose() / std::sqrt(values(src));
  }
  return map;
}

/// Embeds points row-wise into R^r, processing `block` rows at a time.
[[nodiscard]] inline Matrix embed(const NystromMap& map, const Matrix& points,
                                  Index block = 1024) {
  if (points.rows() > 0 && points.cols() != map.landmark_points.cols())
    throw InvalidInputError("embed: point dimension mismatch");
  if (block <= 0) throw InvalidInputError("embed: block size must be positive");
  Matrix out(points.rows(), map.rank());
  for (Index start = 0; start < points.rows(); start += block) {
    const Index rows = std::min(block, points.rows() - start);
    const Matrix cross =
        gram(map.spec, points.middleRows(start, rows), map.landmark_points);
    out.middleRows(start, rows).noalias() = cross * map.factor.transpose();
  }
  return out;
}

[[nodiscard]] inline Matrix embed(const NystromMap& map, const Dataset& ds,
                                  Index block = 1024) {
  return embed(map, ds.x, block);
}

}  // namespace nysvm
