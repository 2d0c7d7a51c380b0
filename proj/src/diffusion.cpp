#include "diffusion.hpp"

#include <algorithm>
#include <cmath>

namespace fpsynth {

NoiseSchedule linear_schedule(int T, double beta_start, double beta_end) {
  if (T < 2) fail(Errc::InvalidSchedule, "T must be >= 2");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
    fail(Errc::InvalidSchedule, "need 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.T = T;
  s.beta.resize(T);
  s.alpha.resize(T);
  s.alpha_bar.resize(T);
  s.sigma.resize(T);
  double prod = 1.0;
  for (int i = 0; i < T; ++i) {
    s.beta[i] = beta_start + (beta_end - beta_start) * static_cast<double>(i) / (T - 1);
    s.alpha[i] = 1.0 - s.beta[i];
    prod *= s.alpha[i];
    s.alpha_bar[i] = prod;
    s.sigma[i] = std::sqrt(s.beta[i]);
  }
  return s;
}

LatentImage latent_from_gray(const GrayImage& img) {
  if (img.width != img.height) fail(Errc::DimensionMismatch, "latent images must be square");
  LatentImage x(img.width);
  for (size_t i = 0; i < img.data.size(); ++i) x.data[i] = 2.0 * img.data[i] - 1.0;
  return x;
}

GrayImage gray_from_latent(const LatentImage& x) {
  GrayImage img(x.side, x.side);
  for (size_t i = 0; i < x.data.size(); ++i)
    img.data[i] = std::clamp((x.data[i] + 1.0) / 2.0, 0.0, 1.0);
  return img;
}

LatentImage q_sample(const LatentImage& x0, int t, const std::vector<double>& eps,
                     const NoiseSchedule& s) {
  if (t < 1 || t > s.T) fail(Errc::InvalidArgument, "t out of range");
  if (eps.size() != x0.data.size()) fail(Errc::DimensionMismatch, "eps length != x0 length");
  const double a = std::sqrt(s.alpha_bar_at(t));
  const double b = std::sqrt(1.0 - s.alpha_bar_at(t));
  LatentImage out(x0.side);
  for (size_t i = 0; i < x0.data.size(); ++i) out.data[i] = a * x0.data[i] + b * eps[i];
  return out;
}

TrainingPair training_pair(const LatentImage& x0, const NoiseSchedule& s, Rng& rng) {
  TrainingPair p;
  p.t = static_cast<int>(rng.uniform_int(1, s.T));
  p.eps.resize(x0.data.size());
  for (double& e : p.eps) e = rng.normal();
  p.x_t = q_sample(x0, p.t, p.eps, s);
  return p;
}

namespace {

// In-place reverse update for one trajectory, given the predicted noise.
void reverse_update(double* x, size_t n, const double* eps_hat, int t, const NoiseSchedule& s,
                    Rng& rng) {
  const double inv_sqrt_alpha = 1.0 / std::sqrt(s.alpha_at(t));
  const double coef = s.beta_at(t) / std::sqrt(1.0 - s.alpha_bar_at(t));
  const double sigma = s.sigma_at(t);
  for (size_t i = 0; i < n; ++i) {
    double mean = inv_sqrt_alpha * (x[i] - coef * eps_hat[i]);
    x[i] = (t > 1) ? mean + sigma * rng.normal() : mean;
  }
}

}  // namespace

LatentImage ddpm_step(const NoisePredictor& model, const LatentImage& x_t, int t,
                      const NoiseSchedule& s, Rng& rng) {
  if (t < 1 || t > s.T) fail(Errc::InvalidArgument, "t out of range");
  const int n = static_cast<int>(x_t.data.size());
  std::vector<double> eps_hat(n);
  model(x_t.data.data(), 1, n, t, eps_hat.data());
  LatentImage out = x_t;
  reverse_update(out.data.data(), out.data.size(), eps_hat.data(), t, s, rng);
  return out;
}

GrayImage sample(const NoisePredictor& model, const NoiseSchedule& s, int side, Rng& rng) {
  LatentImage x(side);
  for (double& v : x.data) v = rng.normal();
  for (int t = s.T; t >= 1; --t) x = ddpm_step(model, x, t, s, rng);
  return gray_from_latent(x);
}

std::vector<GrayImage> sample_many(const NoisePredictor& model, const NoiseSchedule& s, int side,
                                   int count, uint64_t seed) {
  const int n = side * side;
  std::vector<Rng> rngs;
  rngs.reserve(count);
  std::vector<double> x(static_cast<size_t>(count) * n);
  for (int b = 0; b < count; ++b) {
    rngs.emplace_back(Rng::derive(seed, "sample", static_cast<uint64_t>(b)));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(b) * n + i] = rngs[b].normal();
  }
  std::vector<double> eps(x.size());
  for (int t = s.T; t >= 1; --t) {
    model(x.data(), count, n, t, eps.data());
    for (int b = 0; b < count; ++b)
      reverse_update(x.data() + static_cast<size_t>(b) * n, n,
                     eps.data() + static_cast<size_t>(b) * n, t, s, rngs[b]);
  }
  std::vector<GrayImage> out;
  out.reserve(count);
  for (int b = 0; b < count; ++b) {
    LatentImage li(side);
    std::copy(x.begin() + static_cast<size_t>(b) * n, x.begin() + static_cast<size_t>(b + 1) * n,
              li.data.begin());
    out.push_back(gray_from_latent(li));
  }
  return out;
}

std::vector<GrayImage> branch_impressions(const NoisePredictor& model, const NoiseSchedule& s,
                                          const BranchSpec& spec, int side, uint64_t seed) {
  if (spec.d < 1 || spec.d >= s.T) fail(Errc::InvalidArgument, "branch d must be in [1, T-1]");
  if (spec.k < 2) fail(Errc::InvalidArgument, "branch k must be >= 2");

  const int n = side * side;
  // Shared prefix T..d+1 yields the identity anchor x_d.
  Rng prefix_rng(Rng::derive(seed, "branch-prefix"));
  LatentImage anchor(side);
  for (double& v : anchor.data) v = prefix_rng.normal();
  for (int t = s.T; t > spec.d; --t) anchor = ddpm_step(model, anchor, t, s, prefix_rng);

  // K continuations d..1, lockstep, each with its own stream.
  std::vector<Rng> rngs;
  rngs.reserve(spec.k);
  std::vector<double> x(static_cast<size_t>(spec.k) * n);
  for (int b = 0; b < spec.k; ++b) {
    rngs.emplace_back(Rng::derive(seed, "branch", static_cast<uint64_t>(b)));
    std::copy(anchor.data.begin(), anchor.data.end(), x.begin() + static_cast<size_t>(b) * n);
  }
  std::vector<double> eps(x.size());
  for (int t = spec.d; t >= 1; --t) {
    model(x.data(), spec.k, n, t, eps.data());
    for (int b = 0; b < spec.k; ++b)
      reverse_update(x.data() + static_cast<size_t>(b) * n, n,
                     eps.data() + static_cast<size_t>(b) * n, t, s, rngs[b]);
  }
  std::vector<GrayImage> out;
  out.reserve(spec.k);
  for (int b = 0; b < spec.k; ++b) {
    LatentImage li(side);
    std::copy(x.begin() + static_cast<size_t>(b) * n, x.begin() + static_cast<size_t>(b + 1) * n,
              li.data.begin());
    out.push_back(gray_from_latent(li));
  }
  return out;
}

}  // namespace fpsynth
