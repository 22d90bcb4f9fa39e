#pragma once

#include "nysvm/data.hpp"
#include "nysvm/diagnostics.hpp"
#include "nysvm/random.hpp"
#include "nysvm/types.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

namespace nysvm {

/// Gaussian inputs x = D^{1/2} z with prescribed covariance eigendecay
/// D_jj ~ j^{-1/p} or e^{-beta*j} (trace-normalized), labeled by a random
/// linear target with optional flip noise and margin enforcement.
struct SynthSpec {
  Index n = 0;
  Index d = 2;
  DecayFamily decay = DecayFamily::polynomial;
  double p = 0.5;
  double beta = 1.0;
  double target_norm = 1.0;
  double noise = 0.0;   // independent label flip probability
  double margin = 0.0;  // 0 disables rejection of |<w*, x>| < margin
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw InvalidInputError("synth: n must be >= 1");
    if (d < 2) throw InvalidInputError("synth: d must be >= 2");
    if (decay == DecayFamily::polynomial && !(p > 0.0 && p < 1.0))
      throw InvalidInputError("synth: p must be in (0, 1)");
    if (decay == DecayFamily::exponential && !(beta > 0.0))
      throw InvalidInputError("synth: beta must be positive");
    if (decay == DecayFamily::none)
      throw InvalidInputError("synth: decay family must be polynomial or exponential");
    if (!(target_norm > 0.0))
      throw InvalidInputError("synth: target norm must be positive");
    if (!(noise >= 0.0 && noise < 0.5))
      throw InvalidInputError("synth: noise must be in [0, 0.5)");
    if (!(margin >= 0.0)) throw InvalidInputError("synth: margin must be >= 0");
  }

  /// Diagonal of the trace-normalized covariance D.
  [[nodiscard]] Vector covariance_diagonal() const {
    Vector diag(d);
    for (Index j = 0; j < d; ++j) {
      const double rank = static_cast<double>(j + 1);
      diag(j) = decay == DecayFamily::polynomial
                    ? std::pow(rank, -1.0 / p)
                    : std::exp(-beta * rank);
    }
    return diag / diag.sum();
  }
};

/// Draws the dataset and the true target. Deterministic per seed.
[[nodiscard]] inline std::pair<Dataset, Vector> generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const Vector scale = spec.covariance_diagonal().cwiseSqrt();
  Vector target(spec.d);
  for (Index j = 0; j < spec.d; ++j) target(j) = rng.normal();
  const double norm = target.norm();
  if (norm == 0.0) target(0) = 1.0;
  target *= spec.target_norm / target.norm();

  Dataset ds;
  {
    std::string decay_tag =
        spec.decay == DecayFamily::polynomial
            ? "p" + format_double(spec.p)
            : "beta" + format_double(spec.beta);
    ds.name = "synth-" + decay_tag + "-n" + std::to_string(spec.n);
  }
  ds.x = Matrix(spec.n, spec.d);
  ds.y = Vector(spec.n);

  Vector point(spec.d);
  for (Index i = 0; i < spec.n; ++i) {
    std::uint64_t attempts = 0;
    double projection = 0.0;
    do {
      if (++attempts > 1000)
        throw InvalidInputError(
            "synth: margin rejection failed 1000 times; margin too large");
      for (Index j = 0; j < spec.d; ++j) point(j) = scale(j) * rng.normal();
      projection = target.dot(point);
    } while (spec.margin > 0.0 && std::abs(projection) < spec.margin);
    ds.x.row(i) = point;
    double label = projection >= 0.0 ? 1.0 : -1.0;
    if (spec.noise > 0.0 && rng.unit_double() < spec.noise) label = -label;
    ds.y(i) = label;
  }
  return {std::move(ds), std::move(target)};
}

}  // namespace nysvm
