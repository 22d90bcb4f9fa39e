#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace nysvm;
using testutil::max_abs_diff;
using testutil::random_dataset;
using testutil::random_matrix;
using testutil::random_psd;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Index> iota_indices(Index count) {
  std::vector<Index> v(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

TEST_CASE("effective_dim_2 closed forms", "[diagnostics]") {
  SECTION("K = n*alpha*I gives n/2") {
    const Index n = 12;
    const double alpha = 0.7;
    const Matrix k =
        alpha * static_cast<double>(n) * Matrix::Identity(n, n);
    REQUIRE_THAT(effective_dim_2(k, alpha),
                 WithinAbs(static_cast<double>(n) / 2.0, 1e-12));
  }
  SECTION("huge alpha sends the dimension to zero") {
    const Matrix k = random_psd(20, 3);
    REQUIRE(effective_dim_2(k, 1e12) < 1e-9);
  }
  SECTION("diagonal Gram matches the direct spectral sum") {
    const Index n = 50;
    Vector lambda(n);
    for (Index j = 0; j < n; ++j)
      lambda(j) = std::pow(static_cast<double>(j + 1), -2.0);
    const Matrix k =
        (static_cast<double>(n) * lambda).asDiagonal().toDenseMatrix();
    const double alpha = 0.01;
    double direct = 0.0;
    for (Index j = 0; j < n; ++j)
      direct += lambda(j) / (lambda(j) + alpha);
    REQUIRE_THAT(effective_dim_2(k, alpha), WithinAbs(direct, 1e-10));
  }
  SECTION("input validation") {
    REQUIRE_THROWS_AS(effective_dim_2(random_psd(5, 1), 0.0),
                      InvalidInputError);
    Matrix indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    REQUIRE_THROWS_AS(effective_dim_2(indefinite, 0.1), NumericalDomainError);
  }
}

TEST_CASE("effective_dim_2 equals the leverage score sum", "[diagnostics]") {
  const Matrix k = random_psd(30, 7);
  for (const double alpha : {0.3, 0.01, 2.0}) {
    const auto scores = exact_leverage_scores(k, alpha);
    REQUIRE_THAT(effective_dim_2(k, alpha), WithinAbs(scores.sum(), 1e-8));
  }
}

TEST_CASE("effective_dim_2 is strictly decreasing in alpha", "[diagnostics]") {
  const Matrix k = random_psd(25, 13);
  double previous = effective_dim_2(k, 1e-4);
  for (const double alpha : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
    const double current = effective_dim_2(k, alpha);
    REQUIRE(current < previous);
    previous = current;
  }
}

TEST_CASE("effective_dim_inf closed forms and ordering", "[diagnostics]") {
  SECTION("scaled identity") {
    const Index n = 10;
    const double alpha = 0.4;
    const double c = alpha * static_cast<double>(n);
    const Matrix k = c * Matrix::Identity(n, n);
    REQUIRE_THAT(effective_dim_inf(k, alpha),
                 WithinAbs(static_cast<double>(n) / 2.0, 1e-12));
  }
  SECTION("never below effective_dim_2") {
    const Matrix k = random_psd(35, 17);
    for (const double alpha : {1e-3, 0.05, 0.5})
      REQUIRE(effective_dim_inf(k, alpha) >=
              effective_dim_2(k, alpha) - 1e-9);
  }
}

TEST_CASE("effective_dim_inf matches the primal brute force", "[diagnostics]") {
  const Index n = 20;
  const Index d = 4;
  const Matrix x = random_matrix(n, d, 19);
  const Matrix k = x * x.transpose();
  const double alpha = 0.2;

  const Matrix covariance = x.transpose() * x / static_cast<double>(n);
  const Matrix shifted = covariance + alpha * Matrix::Identity(d, d);
  double sup = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Vector xi = x.row(i).transpose();
    sup = std::max(sup, xi.dot(shifted.llt().solve(xi)));
  }
  REQUIRE_THAT(effective_dim_inf(k, alpha), WithinAbs(sup, 1e-8));
}

TEST_CASE("projection residual vanishes on spanning landmarks",
          "[diagnostics]") {
  SECTION("all points as landmarks") {
    const auto ds = random_dataset(40, 3, 23);
    const auto spec = KernelSpec::gaussian(1.0);
    REQUIRE(projection_residual(ds, spec, iota_indices(40)) < 1e-8);
  }
  SECTION("identical points need a single landmark") {
    Dataset ds;
    ds.name = "constant";
    ds.x = Matrix::Ones(15, 2);
    ds.y = Vector::Ones(15);
    const auto spec = KernelSpec::gaussian(1.0);
    REQUIRE(projection_residual(ds, spec, {0}) < 1e-10);
  }
}

TEST_CASE("projection residual matches an explicit projector",
          "[diagnostics]") {
  const auto ds = random_dataset(100, 4, 29);
  const auto spec = KernelSpec::gaussian(0.9);
  const auto scores = exact_leverage_scores(gram(spec, ds.x), 0.05);
  const auto landmarks = als_landmarks(scores, 20, 31);

  const Matrix landmark_points = ds.x(landmarks.indices, Eigen::all);
  const Matrix km = gram(spec, landmark_points);
  const Matrix knm = gram(spec, ds.x, landmark_points);
  const Matrix k = gram(spec, ds.x);
  const Matrix projected =
      knm * km.completeOrthogonalDecomposition().pseudoInverse() *
      knm.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      ((k - projected + (k - projected).transpose()) * 0.5).eval(),
      Eigen::EigenvaluesOnly);
  const double oracle = std::max(eig.eigenvalues().maxCoeff(), 0.0) /
                        static_cast<double>(ds.n());

  REQUIRE_THAT(projection_residual(ds, spec, landmarks),
               WithinAbs(oracle, 1e-6));
}

TEST_CASE("projection residual shrinks as landmarks are added",
          "[diagnostics]") {
  const auto ds = random_dataset(80, 3, 37);
  const auto spec = KernelSpec::gaussian(1.0);
  double previous = projection_residual(ds, spec, iota_indices(5));
  for (const Index m : {10, 20, 40}) {
    const double current = projection_residual(ds, spec, iota_indices(m));
    REQUIRE(current <= previous + 1e-9);
    previous = current;
  }
}

TEST_CASE("projection residual large-n paths agree with dense evaluation",
          "[diagnostics]") {
  const Index n = 700;  // above the dense-path cutoff
  const auto landmarks = iota_indices(40);

  const auto dense_oracle = [&](const Dataset& ds, const KernelSpec& spec) {
    const auto map = fit_embedding(ds, spec, landmarks);
    const Matrix e = embed(map, ds);
    const Matrix k = gram(spec, ds.x);
    const Matrix residual =
        ((k - e * e.transpose()) + (k - e * e.transpose()).transpose()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(residual,
                                              Eigen::EigenvaluesOnly);
    return std::max(eig.eigenvalues().maxCoeff(), 0.0) /
           static_cast<double>(n);
  };

  SECTION("stored-Gram power iteration") {
    const auto ds = random_dataset(n, 5, 41);
    const auto spec = KernelSpec::gaussian(1.5);
    const double oracle = dense_oracle(ds, spec);
    const double fast = projection_residual(ds, spec, landmarks);
    REQUIRE_THAT(fast, WithinAbs(oracle, 1e-6 + 1e-4 * oracle));
  }
  SECTION("matrix-free linear path") {
    const auto ds = random_dataset(n, 5, 43);
    const auto spec = KernelSpec::linear();
    const double oracle = dense_oracle(ds, spec);
    const double fast = projection_residual(ds, spec, landmarks);
    REQUIRE_THAT(fast, WithinAbs(oracle, 1e-6 + 1e-4 * oracle));
  }
}

TEST_CASE("projection residual error cases", "[diagnostics]") {
  SECTION("empty landmark set") {
    const auto ds = random_dataset(10, 2, 3);
    LandmarkSet empty;
    REQUIRE_THROWS_AS(
        projection_residual(ds, KernelSpec::gaussian(1.0), empty),
        InvalidInputError);
  }
  SECTION("indefinite precomputed kernel") {
    Matrix k(3, 3);
    k << 1.0, 0.9, 0.0, 0.9, 0.5, 0.0, 0.0, 0.0, 1.0;
    const auto spec = KernelSpec::precomputed(k);
    Dataset ds;
    ds.name = "indices";
    ds.x = Matrix(3, 1);
    ds.x << 0.0, 1.0, 2.0;
    ds.y = Vector::Ones(3);
    REQUIRE_THROWS_AS(projection_residual(ds, spec, {2}),
                      NumericalDomainError);
  }
}

TEST_CASE("analytic dimension bounds", "[diagnostics]") {
  SECTION("polynomial closed forms") {
    REQUIRE_THAT(polynomial_dim_bound(1.0, 2.0, 1.0), WithinAbs(2.0, 1e-12));
    REQUIRE(polynomial_dim_bound(1.0, 2.0, 1e12) < 1e-5);
    REQUIRE_THROWS_AS(polynomial_dim_bound(1.0, 1.0, 0.5), InvalidInputError);
    REQUIRE_THROWS_AS(polynomial_dim_bound(1.0, 0.5, 0.5), InvalidInputError);
    REQUIRE_THROWS_AS(polynomial_dim_bound(0.0, 2.0, 0.5), InvalidInputError);
  }
  SECTION("exponential closed forms") {
    for (const double beta : {0.5, 1.0, 3.0})
      REQUIRE_THAT(exponential_dim_bound(0.2, beta, 0.2),
                   WithinAbs(std::log(2.0) / beta, 1e-12));
    REQUIRE_THAT(exponential_dim_bound(1.0, 1.0, 1.0 / (std::exp(1.0) - 1.0)),
                 WithinAbs(1.0, 1e-12));
    REQUIRE_THROWS_AS(exponential_dim_bound(1.0, 0.0, 0.5), InvalidInputError);
  }
  SECTION("polynomial bound dominates the truncated spectral sum") {
    const double alpha = 0.01;
    double measured = 0.0;
    for (Index j = 1; j <= 10000; ++j) {
      const double lambda = std::pow(static_cast<double>(j), -2.0);
      measured += lambda / (lambda + alpha);
    }
    REQUIRE(measured <= polynomial_dim_bound(1.0, 2.0, alpha));
  }
  SECTION("exponential bound dominates the truncated spectral sum") {
    const double alpha = 0.05;
    double measured = 0.0;
    for (Index j = 1; j <= 10000; ++j) {
      const double lambda = std::exp(-static_cast<double>(j));
      measured += lambda / (lambda + alpha);
    }
    REQUIRE(measured <= exponential_dim_bound(1.0, 1.0, alpha));
  }
}

TEST_CASE("eigendecay fits recover planted decays", "[diagnostics]") {
  SECTION("power law") {
    Vector spectrum(100);
    for (Index j = 0; j < 100; ++j)
      spectrum(j) = std::pow(static_cast<double>(j + 1), -2.0);
    const auto report = fit_eigendecay(spectrum);
    REQUIRE(report.decay.family == DecayFamily::polynomial);
    REQUIRE_THAT(report.decay.p, WithinAbs(0.5, 0.01));
    REQUIRE(report.decay.residual < 1e-12);
    REQUIRE(report.eigenvalues.size() == 100);
    for (Index j = 1; j < 100; ++j)
      REQUIRE(report.eigenvalues(j) <= report.eigenvalues(j - 1));
  }
  SECTION("exponential") {
    Vector spectrum(80);
    for (Index j = 0; j < 80; ++j)
      spectrum(j) = std::exp(-0.5 * static_cast<double>(j + 1));
    const auto report = fit_eigendecay(spectrum);
    REQUIRE(report.decay.family == DecayFamily::exponential);
    REQUIRE_THAT(report.decay.beta, WithinAbs(0.5, 0.01));
  }
  SECTION("gaussian Gram on a 1-D grid is exponential-like") {
    const Index n = 60;
    Matrix points(n, 1);
    for (Index i = 0; i < n; ++i)
      points(i, 0) = static_cast<double>(i) / static_cast<double>(n - 1);
    const Matrix k = gram(KernelSpec::gaussian(0.5), points);
    const auto report = fit_eigendecay_from_gram(k);
    REQUIRE(report.decay.family == DecayFamily::exponential);
  }
  SECTION("unsorted input is sorted for the report") {
    Vector spectrum(12);
    for (Index j = 0; j < 12; ++j)
      spectrum(j) = std::pow(static_cast<double>(12 - j), -2.0);
    const auto report = fit_eigendecay(spectrum);
    REQUIRE(report.eigenvalues(0) == 1.0);
  }
  SECTION("insufficient positive eigenvalues") {
    Vector tiny = Vector::Zero(30);
    for (Index j = 0; j < 9; ++j) tiny(j) = 1.0 / static_cast<double>(j + 1);
    REQUIRE_THROWS_AS(fit_eigendecay(tiny), InsufficientDataError);
    REQUIRE_THROWS_AS(fit_eigendecay(Vector(0)), InsufficientDataError);
  }
  SECTION("negative eigenvalues beyond tolerance are rejected") {
    Vector bad(20);
    for (Index j = 0; j < 20; ++j)
      bad(j) = std::pow(static_cast<double>(j + 1), -1.5);
    bad(19) = -0.5;
    REQUIRE_THROWS_AS(fit_eigendecay(bad), NumericalDomainError);
    bad(19) = -1e-12;
    const auto report = fit_eigendecay(bad);
    REQUIRE(report.eigenvalues.minCoeff() == 0.0);
  }
}

TEST_CASE("dimension_bound dispatches on the fitted family", "[diagnostics]") {
  DecayFit poly;
  poly.family = DecayFamily::polynomial;
  poly.p = 0.5;
  poly.gamma = 1.2;
  REQUIRE_THAT(dimension_bound(poly, 0.3),
               WithinAbs(polynomial_dim_bound(1.2, 2.0, 0.3), 1e-12));

  DecayFit expo;
  expo.family = DecayFamily::exponential;
  expo.beta = 0.7;
  expo.gamma = 0.9;
  REQUIRE_THAT(dimension_bound(expo, 0.3),
               WithinAbs(exponential_dim_bound(0.9, 0.7, 0.3), 1e-12));

  REQUIRE_THROWS_AS(dimension_bound(DecayFit{}, 0.3), InvalidInputError);
}

TEST_CASE("subspace size suggestions follow the rate formulas",
          "[diagnostics]") {
  SpectrumReport poly_half;
  poly_half.decay.family = DecayFamily::polynomial;
  poly_half.decay.p = 0.5;

  SpectrumReport expo;
  expo.decay.family = DecayFamily::exponential;
  expo.decay.beta = 1.0;

  SECTION("tabulated values") {
    REQUIRE(suggest_subspace_size(10000, poly_half, SizeRegime::basic()) ==
            922);
    REQUIRE(suggest_subspace_size(10000, expo, SizeRegime::basic()) == 85);
    REQUIRE(suggest_subspace_size(1000000, poly_half, SizeRegime::fast()) ==
            138156);
    REQUIRE(suggest_subspace_size(10000, poly_half,
                                  SizeRegime::general(1.0, 1.0)) == 4276);
  }
  SECTION("general regime reduces to the worst-case exponent") {
    // r=1, theta=0: min(2p, p(r+1)/(r(2-p)+p)) = min(1, 1/(2-0.5+0.5)) = 0.5
    REQUIRE(suggest_subspace_size(10000, poly_half,
                                  SizeRegime::general(1.0, 0.0)) == 922);
  }
  SECTION("results are clamped to [1, n]") {
    REQUIRE(suggest_subspace_size(2, expo, SizeRegime::basic()) == 1);
    SpectrumReport steep = poly_half;
    steep.decay.p = 1.0 - 1e-9;
    REQUIRE(suggest_subspace_size(10, steep, SizeRegime::fast()) == 10);
  }
  SECTION("invalid arguments") {
    REQUIRE_THROWS_AS(
        suggest_subspace_size(100, SpectrumReport{}, SizeRegime::basic()),
        InvalidInputError);
    REQUIRE_THROWS_AS(suggest_subspace_size(0, poly_half, SizeRegime::basic()),
                      InvalidInputError);
    REQUIRE_THROWS_AS(
        suggest_subspace_size(100, poly_half, SizeRegime::general(0.0, 0.5)),
        InvalidInputError);
    REQUIRE_THROWS_AS(
        suggest_subspace_size(100, poly_half, SizeRegime::general(1.5, 0.5)),
        InvalidInputError);
    REQUIRE_THROWS_AS(
        suggest_subspace_size(100, poly_half, SizeRegime::general(1.0, -0.1)),
        InvalidInputError);
    REQUIRE_THROWS_AS(
        suggest_subspace_size(100, poly_half, SizeRegime::general(1.0, 1.1)),
        InvalidInputError);
    REQUIRE_THROWS_AS(suggest_subspace_size(100, expo, SizeRegime::fast()),
                      InvalidInputError);
    REQUIRE_THROWS_AS(
        suggest_subspace_size(100, expo, SizeRegime::general(1.0, 1.0)),
        InvalidInputError);
  }
}

TEST_CASE("als landmarks at the matched size keep the residual below 3 alpha",
          "[diagnostics]") {
  SynthSpec synth;
  synth.n = 300;
  synth.d = 60;
  synth.decay = DecayFamily::polynomial;
  synth.p = 0.5;
  synth.seed = 51;
  const auto [ds, target] = generate(synth);
  const auto spec = KernelSpec::linear();

  const double alpha = 0.05;
  const Index m = static_cast<Index>(std::ceil(
      std::pow(alpha, -synth.p) * std::log(static_cast<double>(synth.n))));

  const int trials = 20;
  int ok = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto landmarks =
        sample_landmarks(ds, spec, SamplingMethod::als, m, alpha, 150,
                         static_cast<std::uint64_t>(trial));
    if (projection_residual(ds, spec, landmarks) <= 3.0 * alpha) ++ok;
  }
  REQUIRE(ok >= 18);
}
