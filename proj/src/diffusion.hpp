#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "common.hpp"
#include "image.hpp"
#include "rng.hpp"

namespace fpsynth {

// Per-step noising schedule. Index convention: vectors are 0-based, the
// accessors take t in 1..T.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> beta;       // beta_t
  std::vector<double> alpha;      // 1 - beta_t
  std::vector<double> alpha_bar;  // prod_{s<=t} alpha_s
  std::vector<double> sigma;      // sqrt(beta_t), posterior std

  double beta_at(int t) const { return beta[t - 1]; }
  double alpha_at(int t) const { return alpha[t - 1]; }
  double alpha_bar_at(int t) const { return alpha_bar[t - 1]; }
  double sigma_at(int t) const { return sigma[t - 1]; }
};

// betas linearly interpolated between beta_start and beta_end inclusive.
NoiseSchedule linear_schedule(int T, double beta_start, double beta_end);

// Model-space image: values unbounded, side*side, mapped from GrayImage by
// x -> 2x - 1 and back by clamp((x+1)/2).
struct LatentImage {
  int side = 0;
  std::vector<double> data;

  LatentImage() = default;
  explicit LatentImage(int s, double fill = 0.0)
      : side(s), data(static_cast<size_t>(s) * s, fill) {}
};

LatentImage latent_from_gray(const GrayImage& img);
GrayImage gray_from_latent(const LatentImage& x);

// Noise predictor over a lockstep batch: given B latents of n values each,
// all at timestep t, writes B predicted noise fields. The denoiser module
// provides the real implementation; tests plug in oracles.
using NoisePredictor =
    std::function<void(const double* x, int batch, int n, int t, double* eps_out)>;

struct BranchSpec {
  int d = 400;  // branch timestep, 1 <= d < T
  int k = 4;    // impressions per identity, >= 2
};

// Closed-form forward process: sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
LatentImage q_sample(const LatentImage& x0, int t, const std::vector<double>& eps,
                     const NoiseSchedule& s);

struct TrainingPair {
  LatentImage x_t;
  int t = 0;
  std::vector<double> eps;
};

// Draws t ~ U{1..T} and eps ~ N(0, I); the denoiser's regression target is
// exactly the returned eps.
TrainingPair training_pair(const LatentImage& x0, const NoiseSchedule& s, Rng& rng);

// One ancestral reverse step x_t -> x_{t-1}; the noise term is dropped at t=1.
LatentImage ddpm_step(const NoisePredictor& model, const LatentImage& x_t, int t,
                      const NoiseSchedule& s, Rng& rng);

// Full reverse trajectory from x_T ~ N(0, I). Deterministic in (model, seed).
GrayImage sample(const NoisePredictor& model, const NoiseSchedule& s, int side, Rng& rng);

// Draws `count` independent samples in lockstep (one model call per timestep
// covers the whole batch). Each image consumes only its own derived stream,
// so outputs are bit-identical to sampling them one at a time.
std::vector<GrayImage> sample_many(const NoisePredictor& model, const NoiseSchedule& s, int side,
                                   int count, uint64_t seed);

// Identity branching: one shared trajectory T..d+1 gives the anchor x_d, then
// k independent continuations d..1 with fresh randomness.
std::vector<GrayImage> branch_impressions(const NoisePredictor& model, const NoiseSchedule& s,
                                          const BranchSpec& spec, int side, uint64_t seed);

}  // namespace fpsynth
