#include "edmshrink/noise.hpp"

#include <cmath>
#include <random>
#include <string>

#include "edmshrink/errors.hpp"

namespace edmshrink {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) noexcept
    : key_(mix64(seed ^ mix64(replicate ^ mix64(stream)))) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "gamma") return NoiseKind::gamma;
  throw InputError("unknown noise model '" + std::string(name) + "'");
}

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::gaussian ? "gaussian" : "gamma";
}

void NoiseModel::validate() const {
  // sigma2 == 0 is accepted as a noiseless smoke-test setting.
  if (kind == NoiseKind::gaussian && !(sigma2 >= 0.0 && std::isfinite(sigma2)))
    throw DomainError("gaussian noise needs a finite sigma2 >= 0");
}

SymHollowMatrix<double> add_noise(const SymHollowMatrix<double>& d, const NoiseModel& model,
                                  std::uint64_t seed, std::uint64_t replicate) {
  model.validate();
  const Eigen::Index n = d.n();
  Matrix<double> x = Matrix<double>::Zero(n, n);
  const double sigma = std::sqrt(model.sigma2);
  std::uint64_t pair = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++pair) {
      CounterRng rng(seed, replicate, pair);
      const double dij = d(i, j);
      double v = dij;
      if (model.kind == NoiseKind::gaussian) {
        if (sigma > 0.0) v += sigma * std::normal_distribution<double>(0.0, 1.0)(rng);
      } else {
        if (!(dij > 0.0))
          throw DomainError("gamma noise needs positive distances; d(" + std::to_string(i) + "," +
                            std::to_string(j) + ") = " + std::to_string(dij));
        v = std::gamma_distribution<double>(dij, 1.0)(rng);
      }
      x(i, j) = v;
    }
  }
  return SymHollowMatrix<double>::from_upper(std::move(x));
}

}  // namespace edmshrink
