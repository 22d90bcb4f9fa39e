#pragma once

#include "nysvm/sampling.hpp"
#include "nysvm/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace nysvm {

enum class DecayFamily { none, polynomial, exponential };

[[nodiscard]] inline std::string to_string(DecayFamily family) {
  switch (family) {
    case DecayFamily::none: return "none";
    case DecayFamily::polynomial: return "polynomial";
    case DecayFamily::exponential: return "exponential";
  }
  return "unknown";
}

/// Fitted eigenvalue decay: lambda_j ~ gamma * j^{-1/p} (polynomial) or
/// lambda_j ~ gamma * exp(-beta*j) (exponential).
struct DecayFit {
  DecayFamily family = DecayFamily::none;
  double p = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double residual = 0.0;  // mean squared log-space residual of the chosen fit
};

/// Empirical covariance spectrum (eigenvalues of K divided by n) plus an
/// optional decay fit.
struct SpectrumReport {
  Vector eigenvalues;  // nonincreasing, >= 0
  DecayFit decay;
};

namespace detail {

/// Eigenvalues of a symmetric PSD matrix, descending; small negatives are
/// clamped to zero, larger ones rejected.
inline Vector psd_eigenvalues(const Matrix& k) {
  check_kernel_matrix(k);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericalDomainError("eigendecomposition failed");
  Vector values = eig.eigenvalues().reverse();
  const double lambda_max = std::max(values(0), 0.0);
  if (values(values.size() - 1) < -1e-8 * std::max(lambda_max, 1e-300))
    throw NumericalDomainError("matrix is not positive semidefinite");
  return values.cwiseMax(0.0);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

inline LineFit least_squares(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.residual += r * r;
  }
  fit.residual /= n;
  return fit;
}

template <typename MatVec>
double dominant_eigenvalue(const MatVec& apply, Index n, Index max_iters = 1000,
                           double tol = 1e-11) {
  Rng rng(0x9e3779b9u);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  v.normalize();
  double lambda = 0.0;
  for (Index iter = 0; iter < max_iters; ++iter) {
    const Vector w = apply(v);
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (iter > 0 && std::abs(rayleigh - lambda) <=
                        tol * std::max(std::abs(rayleigh), 1e-300))
      return rayleigh;
    lambda = rayleigh;
  }
  return lambda;
}

inline constexpr Index kDenseResidualLimit = 600;
inline constexpr Index kStoredGramLimit = 6000;

}  // namespace detail

/// d_{alpha,2} of the empirical covariance: sum_j lambda_j/(lambda_j + alpha)
/// with lambda_j = eig(K)/n.
[[nodiscard]] inline double effective_dim_2(const Matrix& k, double alpha) {
  if (!(alpha > 0.0))
    throw InvalidInputError("effective_dim_2: alpha must be positive");
  const Vector values = detail::psd_eigenvalues(k);
  const double n = static_cast<double>(k.rows());
  double total = 0.0;
  for (Index j = 0; j < values.size(); ++j) {
    const double lambda = values(j) / n;
    total += lambda / (lambda + alpha);
  }
  return total;
}

/// d_{alpha,inf} of the empirical covariance: n * max_i l_i(alpha).
[[nodiscard]] inline double effective_dim_inf(const Matrix& k, double alpha) {
  const LeverageScores scores = exact_leverage_scores(k, alpha);
  return static_cast<double>(k.rows()) * scores.values.maxCoeff();
}

/// Largest eigenvalue of the Nystrom residual K - K_nm Km^+ K_mn, divided by
/// n. Dense eigendecomposition below kDenseResidualLimit points, otherwise
/// power iteration (matrix-free for the linear kernel).
[[nodiscard]] inline double projection_residual(const Dataset& ds,
                                                const KernelSpec& spec,
                                                const std::vector<Index>& landmarks) {
  const NystromMap map = fit_embedding(ds, spec, landmarks);
  const Matrix e = embed(map, ds);
  const Index n = ds.n();
  const double denom = static_cast<double>(n);

  if (n <= detail::kDenseResidualLimit) {
    const Matrix k = gram(spec, ds.x);
    Matrix residual = k - e * e.transpose();
    residual = ((residual + residual.transpose()) * 0.5).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig_r(residual, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> eig_k(k, Eigen::EigenvaluesOnly);
    if (eig_r.info() != Eigen::Success || eig_k.info() != Eigen::Success)
      throw NumericalDomainError("projection_residual: eigendecomposition failed");
    const double k_max = std::max(eig_k.eigenvalues().maxCoeff(), 0.0);
    if (eig_r.eigenvalues().minCoeff() < -1e-8 * std::max(k_max, 1e-300))
      throw NumericalDomainError(
          "projection_residual: residual matrix is indefinite");
    return std::max(eig_r.eigenvalues().maxCoeff(), 0.0) / denom;
  }

  std::function<Vector(const Vector&)> apply_k;
  Matrix stored;
  if (spec.family == KernelFamily::linear) {
    apply_k = [&ds](const Vector& v) -> Vector {
      return ds.x * (ds.x.transpose() * v);
    };
  } else if (n <= detail::kStoredGramLimit) {
    stored = gram(spec, ds.x);
    apply_k = [&stored](const Vector& v) -> Vector { return stored * v; };
  } else {
    apply_k = [&ds, &spec, n](const Vector& v) -> Vector {
      Vector out(n);
      constexpr Index block = 1024;
      for (Index start = 0; start < n; start += block) {
        const Index rows = std::min(block, n - start);
        out.segment(start, rows).noalias() =
            gram(spec, ds.x.middleRows(start, rows), ds.x) * v;
      }
      return out;
    };
  }
  const auto apply_residual = [&](const Vector& v) -> Vector {
    return apply_k(v) - e * (e.transpose() * v);
  };
  const double k_max =
      std::max(detail::dominant_eigenvalue(apply_k, n, 300, 1e-9), 0.0);
  const double r_top = detail::dominant_eigenvalue(apply_residual, n);
  if (r_top < -1e-8 * std::max(k_max, 1e-300))
    throw NumericalDomainError(
        "projection_residual: residual matrix is indefinite");
  return std::max(r_top, 0.0) / denom;
}

[[nodiscard]] inline double projection_residual(const Dataset& ds,
                                                const KernelSpec& spec,
                                                const LandmarkSet& landmarks) {
  if (landmarks.indices.empty())
    throw InvalidInputError("projection_residual: landmark set is empty");
  return projection_residual(ds, spec, landmarks.indices);
}

/// d_{alpha,2} bound gamma * beta/(beta-1) * alpha^{-1/beta} under the decay
/// lambda_j <= gamma * j^{-beta}.
[[nodiscard]] inline double polynomial_dim_bound(double gamma, double beta,
                                                 double alpha) {
  if (!(beta > 1.0))
    throw InvalidInputError("polynomial_dim_bound: beta must exceed 1");
  if (!(gamma > 0.0) || !(alpha > 0.0))
    throw InvalidInputError("polynomial_dim_bound: gamma and alpha must be positive");
  return gamma * beta / (beta - 1.0) * std::pow(alpha, -1.0 / beta);
}

/// d_{alpha,2} bound ln(1 + gamma/alpha)/beta under lambda_j <= gamma * e^{-beta*j}.
[[nodiscard]] inline double exponential_dim_bound(double gamma, double beta,
                                                  double alpha) {
  if (!(beta > 0.0) || !(gamma > 0.0) || !(alpha > 0.0))
    throw InvalidInputError("exponential_dim_bound: all arguments must be positive");
  return std::log1p(gamma / alpha) / beta;
}

/// Least-squares decay fit over the middle 80% of the positive spectrum:
/// log lambda_j against log j (polynomial) and against j (exponential); the
/// family with the smaller residual wins.
[[nodiscard]] inline SpectrumReport fit_eigendecay(const Vector& spectrum) {
  if (spectrum.size() == 0)
    throw InsufficientDataError("fit_eigendecay: empty spectrum");
  Vector sorted = spectrum;
  std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<>());
  const double lambda_max = std::max(sorted(0), 0.0);
  if (sorted(sorted.size() - 1) < -1e-8 * std::max(lambda_max, 1e-300))
    throw NumericalDomainError("fit_eigendecay: negative eigenvalue");
  sorted = sorted.cwiseMax(0.0);

  // eigenvalues at the relative noise floor are artifacts of the psd clamp,
  // not measurements; including them flattens the fit window
  const double floor = lambda_max * 1e-12;
  std::vector<double> positive;
  positive.reserve(static_cast<std::size_t>(sorted.size()));
  for (Index i = 0; i < sorted.size(); ++i)
    if (sorted(i) > floor) positive.push_back(sorted(i));
  if (positive.size() < 10)
    throw InsufficientDataError(
        "fit_eigendecay: need at least 10 strictly positive eigenvalues");

  const auto count = static_cast<Index>(positive.size());
  const Index drop = static_cast<Index>(
      std::floor(0.1 * static_cast<double>(count)));
  const Index lo = drop;            // 0-based, rank j = lo + 1
  const Index hi = count - drop;    // exclusive

  std::vector<double> log_rank, rank, log_value;
  for (Index i = lo; i < hi; ++i) {
    const double j = static_cast<double>(i + 1);
    log_rank.push_back(std::log(j));
    rank.push_back(j);
    log_value.push_back(std::log(positive[static_cast<std::size_t>(i)]));
  }
  const detail::LineFit poly = detail::least_squares(log_rank, log_value);
  const detail::LineFit expo = detail::least_squares(rank, log_value);

  SpectrumReport report;
  report.eigenvalues = sorted;
  if (poly.residual <= expo.residual) {
    report.decay.family = DecayFamily::polynomial;
    const double p_raw = poly.slope < 0.0 ? -1.0 / poly.slope : 1.0;
    report.decay.p = std::clamp(p_raw, 1e-6, 1.0 - 1e-9);
    report.decay.gamma = std::exp(poly.intercept);
    report.decay.residual = poly.residual;
  } else {
    report.decay.family = DecayFamily::exponential;
    report.decay.beta = std::max(-expo.slope, 1e-12);
    report.decay.gamma = std::exp(expo.intercept);
    report.decay.residual = expo.residual;
  }
  return report;
}

[[nodiscard]] inline SpectrumReport fit_eigendecay_from_gram(const Matrix& k) {
  const Vector values = detail::psd_eigenvalues(k);
  return fit_eigendecay(values / static_cast<double>(k.rows()));
}

/// Evaluates the analytic d_{alpha,2} bound matching a fitted decay family.
[[nodiscard]] inline double dimension_bound(const DecayFit& fit, double alpha) {
  switch (fit.family) {
    case DecayFamily::polynomial:
      return polynomial_dim_bound(fit.gamma, 1.0 / fit.p, alpha);
    case DecayFamily::exponential:
      return exponential_dim_bound(fit.gamma, fit.beta, alpha);
    case DecayFamily::none:
      break;
  }
  throw InvalidInputError("dimension_bound: report has no fitted family");
}

struct SizeRegime {
  enum class Kind { basic, fast, general };
  Kind kind = Kind::basic;
  double r = 1.0;      // source-condition exponent, general regime only
  double theta = 1.0;  // Bernstein exponent, general regime only

  [[nodiscard]] static SizeRegime basic() { return {Kind::basic, 1.0, 1.0}; }
  [[nodiscard]] static SizeRegime fast() { return {Kind::fast, 1.0, 1.0}; }
  [[nodiscard]] static SizeRegime general(double r, double theta) {
    return {Kind::general, r, theta};
  }
};

/// Subspace sizes prescribed by the rate analysis (natural logs, constants
/// set to 1), clamped to [1, n].
[[nodiscard]] inline Index suggest_subspace_size(Index n,
                                                 const SpectrumReport& report,
                                                 const SizeRegime& regime) {
  if (n < 1) throw InvalidInputError("suggest_subspace_size: n must be >= 1");
  if (report.decay.family == DecayFamily::none)
    throw InvalidInputError("suggest_subspace_size: report has no fitted family");
  if (regime.kind == SizeRegime::Kind::general &&
      (!(regime.r > 0.0 && regime.r <= 1.0) ||
       !(regime.theta >= 0.0 && regime.theta <= 1.0)))
    throw InvalidInputError(
        "suggest_subspace_size: need (r, theta) in (0,1] x [0,1]");

  const double log_n = std::log(static_cast<double>(n));
  double raw = 0.0;
  if (report.decay.family == DecayFamily::exponential) {
    if (regime.kind != SizeRegime::Kind::basic)
      throw InvalidInputError(
          "suggest_subspace_size: only the basic regime is defined for "
          "exponential decay");
    raw = log_n * log_n;
  } else {
    const double p = report.decay.p;
    double exponent = p;
    if (regime.kind == SizeRegime::Kind::fast) {
      exponent = 2.0 * p / (1.0 + p);
    } else if (regime.kind == SizeRegime::Kind::general) {
      const double r = regime.r;
      const double theta = regime.theta;
      exponent = std::min(
          2.0 * p,
          p * (r + 1.0) / (r * (2.0 - p - theta + theta * p) + p));
    }
    raw = std::pow(static_cast<double>(n), exponent) * log_n;
  }
  const double clamped =
      std::clamp(std::ceil(raw), 1.0, static_cast<double>(n));
  return static_cast<Index>(clamped);
}

}  // namespace nysvm
