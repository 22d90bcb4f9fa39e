#pragma once

#include "nysvm/types.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <utility>

namespace nysvm {

enum class KernelFamily { gaussian, linear, precomputed };

[[nodiscard]] inline std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::linear: return "linear";
    case KernelFamily::precomputed: return "precomputed";
  }
  return "unknown";
}

/// Kernel description. For the precomputed family, "points" are 1-d vectors
/// holding a row index into the stored Gram matrix.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double sigma = 1.0;
  std::shared_ptr<const Matrix> matrix;

  [[nodiscard]] static KernelSpec gaussian(double sigma) {
    KernelSpec spec;
    spec.family = KernelFamily::gaussian;
    spec.sigma = sigma;
    spec.validate();
    return spec;
  }

  [[nodiscard]] static KernelSpec linear() {
    KernelSpec spec;
    spec.family = KernelFamily::linear;
    return spec;
  }

  [[nodiscard]] static KernelSpec precomputed(Matrix gram) {
    KernelSpec spec;
    spec.family = KernelFamily::precomputed;
    spec.matrix = std::make_shared<const Matrix>(std::move(gram));
    spec.validate();
    return spec;
  }

  void validate() const {
    if (family == KernelFamily::gaussian && !(sigma > 0.0))
      throw InvalidInputError("gaussian kernel requires sigma > 0");
    if (family == KernelFamily::precomputed) {
      if (!matrix) throw InvalidInputError("precomputed kernel has no matrix");
      const Matrix& k = *matrix;
      if (k.rows() != k.cols())
        throw InvalidInputError("precomputed kernel matrix must be square");
      const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
      if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InvalidInputError("precomputed kernel matrix must be symmetric");
      if (k.rows() > 0 && k.diagonal().minCoeff() < -1e-10 * scale)
        throw InvalidInputError(
            "precomputed kernel matrix has a negative diagonal entry");
    }
  }
};

namespace detail {

inline Index precomputed_index(const KernelSpec& spec, double raw) {
  const Matrix& k = *spec.matrix;
  const double rounded = std::nearbyint(raw);
  if (!(std::abs(raw - rounded) <= 1e-9) || rounded < 0.0 ||
      rounded >= static_cast<double>(k.rows()))
    throw InvalidInputError("precomputed kernel index out of range");
  return static_cast<Index>(rounded);
}

}  // namespace detail

/// Single kernel evaluation K(x, x').
template <typename DerivedA, typename DerivedB>
[[nodiscard]] double eval_kernel(const KernelSpec& spec,
                                 const Eigen::MatrixBase<DerivedA>& x,
                                 const Eigen::MatrixBase<DerivedB>& y) {
  if (x.size() != y.size())
    throw InvalidInputError("eval_kernel: dimension mismatch");
  switch (spec.family) {
    case KernelFamily::linear:
      return x.dot(y);
    case KernelFamily::gaussian: {
      const double d2 = (x - y).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    }
    case KernelFamily::precomputed: {
      spec.validate();
      if (x.size() != 1)
        throw InvalidInputError(
            "precomputed kernel expects 1-d index points");
      const Index i = detail::precomputed_index(spec, x(0));
      const Index j = detail::precomputed_index(spec, y(0));
      return (*spec.matrix)(i, j);
    }
  }
  throw InvalidInputError("eval_kernel: unknown kernel family");
}

/// Cross Gram matrix K(A_i, B_j) for row-wise point sets, computed in row
/// blocks so peak memory stays at O(block * |B|).
[[nodiscard]] inline Matrix gram(const KernelSpec& spec, const Matrix& a,
                                 const Matrix& b, Index block = 1024) {
  if (a.cols() != b.cols() && a.rows() > 0 && b.rows() > 0)
    throw InvalidInputError("gram: dimension mismatch between point sets");
  if (block <= 0) throw InvalidInputError("gram: block size must be positive");
  Matrix k(a.rows(), b.rows());
  if (a.rows() == 0 || b.rows() == 0) return k;

  switch (spec.family) {
    case KernelFamily::linear: {
      for (Index start = 0; start < a.rows(); start += block) {
        const Index rows = std::min(block, a.rows() - start);
        k.middleRows(start, rows).noalias() =
            a.middleRows(start, rows) * b.transpose();
      }
      return k;
    }
    case KernelFamily::gaussian: {
      const Vector b_norms = b.rowwise().squaredNorm();
      const double inv = 1.0 / (2.0 * spec.sigma * spec.sigma);
      for (Index start = 0; start < a.rows(); start += block) {
        const Index rows = std::min(block, a.rows() - start);
        const auto ab = a.middleRows(start, rows);
        const Vector a_norms = ab.rowwise().squaredNorm();
        Matrix d2 = (-2.0 * ab) * b.transpose();
        d2.colwise() += a_norms;
        d2.rowwise() += b_norms.transpose();
        k.middleRows(start, rows) =
            (-(d2.cwiseMax(0.0)) * inv).array().exp().matrix();
      }
      return k;
    }
    case KernelFamily::precomputed: {
      spec.validate();
      if (a.cols() != 1 || b.cols() != 1)
        throw InvalidInputError("precomputed kernel expects 1-d index points");
      for (Index i = 0; i < a.rows(); ++i) {
        const Index ai = detail::precomputed_index(spec, a(i, 0));
        for (Index j = 0; j < b.rows(); ++j)
          k(i, j) = (*spec.matrix)(ai, detail::precomputed_index(spec, b(j, 0)));
      }
      return k;
    }
  }
  throw InvalidInputError("gram: unknown kernel family");
}

/// Symmetric Gram matrix of one point set; symmetry is enforced exactly.
[[nodiscard]] inline Matrix gram(const KernelSpec& spec, const Matrix& a,
                                 Index block = 1024) {
  Matrix k = gram(spec, a, a, block);
  k = ((k + k.transpose()) * 0.5).eval();
  if (spec.family == KernelFamily::gaussian) k.diagonal().setOnes();
  return k;
}

}  // namespace nysvm
