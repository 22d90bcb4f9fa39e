#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

using namespace nysvm;
using testutil::max_abs_diff;
using Catch::Matchers::WithinAbs;

namespace {

Vector covariance_spectrum(const Matrix& x) {
  const Matrix covariance =
      x.transpose() * x / static_cast<double>(x.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance,
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

}  // namespace

TEST_CASE("synth covariance diagonal is trace normalized", "[synth]") {
  SECTION("polynomial decay near p = 1") {
    SynthSpec spec;
    spec.d = 2;
    spec.p = 1.0 - 1e-9;
    const Vector diag = spec.covariance_diagonal();
    REQUIRE_THAT(diag(0), WithinAbs(1.0 / 1.5, 1e-6));
    REQUIRE_THAT(diag(1), WithinAbs(0.5 / 1.5, 1e-6));
  }
  SECTION("exponential decay") {
    SynthSpec spec;
    spec.d = 3;
    spec.decay = DecayFamily::exponential;
    spec.beta = 1.0;
    const Vector diag = spec.covariance_diagonal();
    REQUIRE_THAT(diag.sum(), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(diag(1) / diag(0), WithinAbs(std::exp(-1.0), 1e-12));
  }
  SECTION("always sums to one") {
    SynthSpec spec;
    spec.d = 37;
    spec.p = 0.3;
    REQUIRE_THAT(spec.covariance_diagonal().sum(), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("synth datasets are realizable without noise", "[synth]") {
  SynthSpec spec;
  spec.n = 200;
  spec.d = 10;
  spec.p = 0.5;
  spec.seed = 4;
  const auto [ds, target] = generate(spec);

  REQUIRE(ds.n() == 200);
  REQUIRE(ds.dim() == 10);
  REQUIRE_THAT(target.norm(), WithinAbs(1.0, 1e-12));
  for (Index i = 0; i < ds.n(); ++i) {
    const double projection = target.dot(ds.x.row(i).transpose());
    const double label = projection >= 0.0 ? 1.0 : -1.0;
    REQUIRE(ds.y(i) == label);
  }
  ds.validate();
}

TEST_CASE("synth generation is deterministic per seed", "[synth]") {
  SynthSpec spec;
  spec.n = 50;
  spec.d = 6;
  spec.p = 0.4;
  spec.noise = 0.1;
  spec.seed = 12;
  const auto [a, ta] = generate(spec);
  const auto [b, tb] = generate(spec);
  REQUIRE(max_abs_diff(a.x, b.x) == 0.0);
  REQUIRE((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((ta - tb).cwiseAbs().maxCoeff() == 0.0);

  spec.seed = 13;
  const auto [c, tc] = generate(spec);
  REQUIRE(max_abs_diff(a.x, c.x) > 0.0);
}

TEST_CASE("synth names encode the decay and size", "[synth]") {
  SynthSpec spec;
  spec.n = 2000;
  spec.d = 5;
  spec.p = 0.5;
  REQUIRE(generate(spec).first.name == "synth-p0.5-n2000");

  spec.decay = DecayFamily::exponential;
  spec.beta = 1.0;
  spec.n = 100;
  REQUIRE(generate(spec).first.name == "synth-beta1-n100");
}

TEST_CASE("label noise flips roughly the requested fraction", "[synth]") {
  SynthSpec spec;
  spec.n = 4000;
  spec.d = 8;
  spec.p = 0.5;
  spec.noise = 0.2;
  spec.seed = 17;
  const auto [ds, target] = generate(spec);

  Index flipped = 0;
  for (Index i = 0; i < ds.n(); ++i) {
    const double clean =
        target.dot(ds.x.row(i).transpose()) >= 0.0 ? 1.0 : -1.0;
    if (ds.y(i) != clean) ++flipped;
  }
  const double fraction = static_cast<double>(flipped) / 4000.0;
  const double sigma = std::sqrt(0.2 * 0.8 / 4000.0);
  REQUIRE(std::abs(fraction - 0.2) <= 3.0 * sigma);
}

TEST_CASE("margin rejection keeps projections away from zero", "[synth]") {
  SynthSpec spec;
  spec.n = 300;
  spec.d = 6;
  spec.p = 0.5;
  spec.margin = 0.25;
  spec.target_norm = 2.0;
  spec.seed = 23;
  const auto [ds, target] = generate(spec);

  REQUIRE_THAT(target.norm(), WithinAbs(2.0, 1e-12));
  for (Index i = 0; i < ds.n(); ++i)
    REQUIRE(std::abs(target.dot(ds.x.row(i).transpose())) >= 0.25);

  SECTION("an unattainable margin fails loudly") {
    spec.margin = 100.0;
    REQUIRE_THROWS_AS(generate(spec), InvalidInputError);
  }
}

TEST_CASE("empirical spectrum recovers the planted decay", "[synth]") {
  SynthSpec spec;
  spec.n = 2000;
  spec.d = 40;
  spec.p = 0.5;
  spec.seed = 29;
  const auto [ds, target] = generate(spec);

  const auto report = fit_eigendecay(covariance_spectrum(ds.x));
  REQUIRE(report.decay.family == DecayFamily::polynomial);
  REQUIRE_THAT(report.decay.p, WithinAbs(0.5, 0.1));
}

TEST_CASE("top empirical eigenvalues track the planted covariance", "[synth]") {
  const Index d = 30;
  SynthSpec spec;
  spec.d = d;
  spec.n = 50 * d;
  spec.p = 0.5;
  const Vector planted = spec.covariance_diagonal();

  std::vector<double> worst_errors;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    spec.seed = seed;
    const auto [ds, target] = generate(spec);
    const Vector spectrum = covariance_spectrum(ds.x);
    double worst = 0.0;
    for (Index j = 0; j < 10; ++j)
      worst = std::max(worst,
                       std::abs(spectrum(j) - planted(j)) / planted(j));
    worst_errors.push_back(worst);
  }
  std::sort(worst_errors.begin(), worst_errors.end());
  const double median =
      0.5 * (worst_errors[9] + worst_errors[10]);
  REQUIRE(median <= 0.2);
}

TEST_CASE("synth specs are validated", "[synth]") {
  SynthSpec good;
  good.n = 10;
  good.d = 3;
  REQUIRE_NOTHROW(generate(good));

  auto expect_invalid = [](SynthSpec s) {
    REQUIRE_THROWS_AS(generate(s), InvalidInputError);
  };
  SynthSpec s = good;
  s.n = 0;
  expect_invalid(s);
  s = good;
  s.d = 1;
  expect_invalid(s);
  s = good;
  s.p = 0.0;
  expect_invalid(s);
  s = good;
  s.p = 1.0;
  expect_invalid(s);
  s = good;
  s.decay = DecayFamily::exponential;
  s.beta = 0.0;
  expect_invalid(s);
  s = good;
  s.decay = DecayFamily::none;
  expect_invalid(s);
  s = good;
  s.target_norm = 0.0;
  expect_invalid(s);
  s = good;
  s.noise = 0.5;
  expect_invalid(s);
  s = good;
  s.noise = -0.1;
  expect_invalid(s);
  s = good;
  s.margin = -1.0;
  expect_invalid(s);
}

TEST_CASE("synth datasets round trip through the LIBSVM format", "[synth]") {
  SynthSpec spec;
  spec.n = 20;
  spec.d = 5;
  spec.p = 0.6;
  spec.noise = 0.1;
  spec.seed = 31;
  const auto [ds, target] = generate(spec);

  std::ostringstream out;
  save_libsvm(out, ds);
  std::istringstream in(out.str());
  const auto back = parse_libsvm(in, ds.name, 5);

  REQUIRE(max_abs_diff(back.x, ds.x) == 0.0);
  REQUIRE((back.y - ds.y).cwiseAbs().maxCoeff() == 0.0);
}
