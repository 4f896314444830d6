#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "quasifit/dataset.hpp"

namespace quasifit {

// Counter-based PRNG (SplitMix64). The full algorithm is spelled out in
// synth.cpp so a stream can be reproduced outside this codebase: state
// advances by the golden-ratio increment, output is the standard SplitMix64
// finalizer; uniforms take the top 53 bits, normals apply Box-Muller to two
// fresh uniforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double next_uniform();  // in [0, 1)
  double next_normal();   // standard normal

 private:
  std::uint64_t state_;
};

struct SynthConfig {
  std::size_t n = 100;
  std::size_t d = 2;
  double xi = 1.0;          // smoothness in [0, 1]
  double sigma2 = 0.1;      // noise variance
  bool misspecified = false;
  std::uint64_t seed = 1;
};

// s_xi(t) = (t - (1 - xi)) / xi on [1 - xi, 1], zero before. xi = 0 is the
// limit: an indicator of t = 1.
double smoothing(double t, double xi);

// Smoothed step function floor(|x|^2) + s_xi(frac part); increasing and
// quasiconvex for every xi, convex only at xi = 1.
double psi(const std::vector<double>& x, double xi);

// Bumped variant: floor(|x|^2) + 1 on {x >= r(x)}, psi elsewhere. Monotone
// but not quasiconvex.
double psi_dagger(const std::vector<double>& x, double xi);

struct SynthData {
  DataSet data;
  std::vector<double> truth;  // noiseless values at the design points
};

// X ~ Uniform[0,1]^d, Y = truth(X) + sigma * N(0,1), reproducible per seed.
SynthData generate(const SynthConfig& cfg);

}  // namespace quasifit
