#include "quasifit/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quasifit {

std::uint64_t SplitMix64::next_u64() {
  // SplitMix64 (Steele, Lea, Flood 2014): fixed increment, murmur-style mix.
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_normal() {
  // Box-Muller, cosine branch, two fresh uniforms per draw.
  double u1 = next_uniform();
  const double u2 = next_uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double smoothing(double t, double xi) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("smoothing: t outside [0,1]");
  if (!(xi >= 0.0 && xi <= 1.0)) throw std::domain_error("smoothing: xi outside [0,1]");
  if (xi == 0.0) return t == 1.0 ? 1.0 : 0.0;
  if (t < 1.0 - xi) return 0.0;
  return (t - (1.0 - xi)) / xi;
}

namespace {

double norm_sq(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

double psi(const std::vector<double>& x, double xi) {
  const double nsq = norm_sq(x);
  const double fl = std::floor(nsq);
  return fl + smoothing(nsq - fl, xi);
}

double psi_dagger(const std::vector<double>& x, double xi) {
  const double nsq = norm_sq(x);
  const double fl = std::floor(nsq);
  double r;
  if (nsq >= 1.0) {
    r = std::sqrt(fl / 2.0);
  } else {
    r = (std::sqrt(std::ceil(nsq)) + std::sqrt(fl)) / (2.0 * std::numbers::sqrt2);
  }
  bool above = true;
  for (double v : x)
    if (v < r) { above = false; break; }
  if (above) return fl + 1.0;
  return psi(x, xi);
}

SynthData generate(const SynthConfig& cfg) {
  if (cfg.n < 1 || cfg.d < 1) throw std::invalid_argument("generate: n and d must be >= 1");
  if (!(cfg.xi >= 0.0 && cfg.xi <= 1.0))
    throw std::invalid_argument("generate: xi outside [0,1]");
  if (!(cfg.sigma2 >= 0.0)) throw std::invalid_argument("generate: negative variance");

  SplitMix64 rng(cfg.seed);
  const double sigma = std::sqrt(cfg.sigma2);
  SynthData out;
  out.data.x.resize(cfg.n);
  out.data.y.resize(cfg.n);
  out.truth.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto& row = out.data.x[i];
    row.resize(cfg.d);
    for (std::size_t k = 0; k < cfg.d; ++k) row[k] = rng.next_uniform();
    out.truth[i] = cfg.misspecified ? psi_dagger(row, cfg.xi) : psi(row, cfg.xi);
    out.data.y[i] = out.truth[i] + sigma * rng.next_normal();
  }
  return out;
}

}  // namespace quasifit
