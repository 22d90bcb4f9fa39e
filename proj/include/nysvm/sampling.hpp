#pragma once

#include "nysvm/nystrom.hpp"
#include "nysvm/random.hpp"
#include "nysvm/types.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

namespace nysvm {

enum class ScoreKind { exact, approximate };

/// Ridge leverage scores l_i(alpha) = (K (K + alpha*n*I)^{-1})_{ii}. For the
/// approximate kind `t` is the nominal multiplicative accuracy; it is not
/// certified at runtime.
struct LeverageScores {
  Vector values;
  double alpha = 0.0;
  ScoreKind kind = ScoreKind::exact;
  double t = 1.0;

  [[nodiscard]] double sum() const { return values.sum(); }
};

enum class SamplingMethod { uniform, als };

[[nodiscard]] inline std::string to_string(SamplingMethod method) {
  return method == SamplingMethod::uniform ? "uniform" : "als";
}

/// Chosen landmark rows decorated with how they were drawn. For ALS the draws
/// are with replacement and then deduplicated, so indices.size() can be less
/// than `requested`.
struct LandmarkSet {
  std::vector<Index> indices;
  SamplingMethod method = SamplingMethod::uniform;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  Index requested = 0;

  [[nodiscard]] Index effective_size() const {
    return static_cast<Index>(indices.size());
  }
};

namespace detail {

inline void check_kernel_matrix(const Matrix& k) {
  if (k.rows() != k.cols())
    throw InvalidInputError("leverage scores: kernel matrix must be square");
  if (k.rows() == 0)
    throw InvalidInputError("leverage scores: empty kernel matrix");
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
  if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw InvalidInputError("leverage scores: kernel matrix must be symmetric");
}

}  // namespace detail

/// Exact scores via l_i = 1 - alpha*n * ((K + alpha*n*I)^{-1})_{ii}.
[[nodiscard]] inline LeverageScores exact_leverage_scores(const Matrix& k,
                                                          double alpha) {
  detail::check_kernel_matrix(k);
  if (!(alpha > 0.0))
    throw InvalidInputError("leverage scores: alpha must be positive");
  const Index n = k.rows();
  const double an = alpha * static_cast<double>(n);

  Matrix shifted = k;
  shifted.diagonal().array() += an;
  const Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw NumericalDomainError(
        "leverage scores: kernel matrix is not positive semidefinite");
  const Matrix inverse = llt.solve(Matrix::Identity(n, n));

  LeverageScores scores;
  scores.alpha = alpha;
  scores.kind = ScoreKind::exact;
  scores.values = Vector::Ones(n) - an * inverse.diagonal();
  for (Index i = 0; i < n; ++i) {
    if (scores.values(i) < -1e-10 || scores.values(i) > 1.0 + 1e-10)
      throw NumericalDomainError(
          "leverage scores: kernel matrix is not positive semidefinite");
    scores.values(i) = std::clamp(scores.values(i), 0.0, 1.0);
  }
  return scores;
}

/// Two-pass approximation: a uniform pilot of size m0 defines a Nystrom
/// embedding q_i, then l_hat_i = q_i^T (Q^T Q + alpha*n*I)^{-1} q_i.
[[nodiscard]] inline LeverageScores approximate_leverage_scores(
    const Dataset& ds, const KernelSpec& spec, double alpha, Index pilot_size,
    std::uint64_t seed);

/// Uniform sample of m distinct indices from [0, n).
[[nodiscard]] inline LandmarkSet uniform_landmarks(Index n, Index m,
                                                   std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("uniform_landmarks: n must be positive");
  if (m < 1 || m > n)
    throw InvalidInputError("uniform_landmarks: need 1 <= m <= n");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (Index i = 0; i < m; ++i) {
    const Index j = i + rng.uniform_index(n - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  LandmarkSet set;
  set.indices.assign(pool.begin(), pool.begin() + m);
  set.method = SamplingMethod::uniform;
  set.seed = seed;
  set.requested = m;
  return set;
}

/// m i.i.d. draws from Q_alpha(i) = l_i / sum_j l_j, deduplicated in first-
/// occurrence order.
[[nodiscard]] inline LandmarkSet als_landmarks(const LeverageScores& scores,
                                               Index m, std::uint64_t seed) {
  if (m < 1) throw InvalidInputError("als_landmarks: m must be positive");
  const Index n = scores.values.size();
  if (n < 1) throw InvalidInputError("als_landmarks: empty score vector");
  double total = 0.0;
  std::vector<double> cumulative(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double v = scores.values(i);
    if (!(v >= 0.0))
      throw InvalidInputError("als_landmarks: scores must be nonnegative");
    total += v;
    cumulative[static_cast<std::size_t>(i)] = total;
  }
  if (!(total > 0.0))
    throw InvalidInputError("als_landmarks: all scores are zero");

  Rng rng(seed);
  LandmarkSet set;
  set.method = SamplingMethod::als;
  set.alpha = scores.alpha;
  set.seed = seed;
  set.requested = m;
  std::unordered_set<Index> seen;
  for (Index draw = 0; draw < m; ++draw) {
    const double u = rng.unit_double() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const Index i = std::min<Index>(
        static_cast<Index>(it - cumulative.begin()), n - 1);
    if (seen.insert(i).second) set.indices.push_back(i);
  }
  return set;
}

[[nodiscard]] inline NystromMap fit_embedding(const Dataset& ds,
                                              const KernelSpec& spec,
                                              const LandmarkSet& landmarks,
                                              double tol = 1e-12) {
  return fit_embedding(ds, spec, landmarks.indices, tol);
}

inline LeverageScores approximate_leverage_scores(const Dataset& ds,
                                                  const KernelSpec& spec,
                                                  double alpha, Index pilot_size,
                                                  std::uint64_t seed) {
  ds.validate();
  if (!(alpha > 0.0))
    throw InvalidInputError("leverage scores: alpha must be positive");
  const Index n = ds.n();
  if (pilot_size < 1 || pilot_size > n)
    throw InvalidInputError(
        "approximate_leverage_scores: need 1 <= pilot_size <= n");

  const LandmarkSet pilot = uniform_landmarks(n, pilot_size, seed);
  const NystromMap map = fit_embedding(ds, spec, pilot);
  const Matrix q = embed(map, ds);
  const double an = alpha * static_cast<double>(n);

  Matrix c = q.transpose() * q;
  c.diagonal().array() += an;
  const Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success)
    throw NumericalDomainError(
        "approximate_leverage_scores: normal matrix is not positive definite");
  const Matrix b = llt.matrixL().solve(q.transpose());

  LeverageScores scores;
  scores.alpha = alpha;
  scores.kind = ScoreKind::approximate;
  scores.values = b.colwise().squaredNorm().transpose();
  return scores;
}

/// One-call landmark selection. For ALS, `pilot_size` is clamped to n and the
/// pilot seed is derived from `seed` so the pilot and the draws stay
/// decoupled.
[[nodiscard]] inline LandmarkSet sample_landmarks(const Dataset& ds,
                                                  const KernelSpec& spec,
                                                  SamplingMethod method, Index m,
                                                  double alpha, Index pilot_size,
                                                  std::uint64_t seed) {
  if (method == SamplingMethod::uniform)
    return uniform_landmarks(ds.n(), m, seed);
  const Index pilot = std::min(pilot_size, ds.n());
  const LeverageScores scores =
      approximate_leverage_scores(ds, spec, alpha, pilot, mix_seed(seed, 1));
  return als_landmarks(scores, m, mix_seed(seed, 2));
}

}  // namespace nysvm
