#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "diffusion.hpp"
#include "nnops.hpp"
#include "rng.hpp"

namespace fpsynth {

struct TrainConfig {
  int batch_size = 16;
  int steps = 500;
  double learning_rate = 1e-4;
  uint64_t seed = 42;
  int checkpoint_every = 100;
  std::filesystem::path checkpoint_dir;  // empty: no periodic checkpoints
};

template <typename T>
struct StageBufT;

template <typename T>
struct PredictorPool;

// U-shaped noise predictor eps_theta(x_t, t): per level two conv/norm/SiLU
// blocks with a learned per-channel timestep bias, nearest 2x resampling
// between levels, additive skip connections, and a mirrored decoder.
//
// The scalar type is a template parameter: float is the production
// instantiation (vectorized kernels), double exists so gradient correctness
// can be pinned against central finite differences at 1e-4 relative error,
// which float resolution cannot express.
template <typename T>
class DenoiserNet {
 public:
  struct ParamInfo {
    std::string name;
    std::vector<int> shape;
    size_t offset = 0;
    size_t count = 0;
  };

  DenoiserNet(int init_features, int side, int depth, int time_embed_dim, uint64_t seed);

  int side() const { return side_; }
  int init_features() const { return features_; }
  int depth() const { return depth_; }
  int time_embed_dim() const { return embed_dim_; }

  const std::vector<ParamInfo>& param_info() const { return info_; }
  std::vector<T>& values() { return theta_; }
  const std::vector<T>& values() const { return theta_; }
  size_t param_count() const { return theta_.size(); }

  struct Workspace;

  Workspace* new_workspace() const;

  // Single-sample forward; if ws_for_backward the activations stay valid for
  // a following backward() with the same workspace.
  void forward(const T* x, int t, T* eps_out, Workspace& ws, bool keep = false) const;

  // Reverse-mode pass; accumulates d(theta) into grad (size param_count()).
  void backward(const T* d_eps, Workspace& ws, T* grad) const;

  // Batched prediction with doubles at the interface (diffusion runs in
  // double); samples are processed in parallel, outputs depend only on the
  // corresponding inputs.
  void predict_batch(const double* x, int batch, int n, const int* t, double* out) const;

  // Adapter for the diffusion samplers (shared t across the batch). The
  // returned callable keeps per-thread workspaces alive across calls and
  // holds a non-owning pointer to this net.
  NoisePredictor predictor() const;

  // Eq.-style training objective: draws (x_t, t, eps) per batch element from
  // rng, returns mean squared noise-prediction error per element and the
  // parameter gradient (deterministic sample-major reduction).
  double loss_and_grad(const std::vector<const LatentImage*>& x0s, const NoiseSchedule& s,
                       Rng& rng, std::vector<T>& grad) const;

  struct TrainResult {
    std::vector<double> loss_trace;  // one entry per step
  };

  // Adam (beta1 0.9, beta2 0.999, eps 1e-8) over shuffled mini-batches.
  // A non-finite loss restores the last finite parameters and throws
  // NonFiniteLoss after writing a final checkpoint.
  TrainResult train(const std::vector<GrayImage>& corpus, const NoiseSchedule& s,
                    const TrainConfig& cfg);

 private:
  friend struct Workspace;

  struct StageParams {  // offsets into theta_
    size_t conv1_w, conv1_b, norm1_g, norm1_b, temb_w, temb_b;
    size_t conv2_w, conv2_b, norm2_g, norm2_b;
    int channels;
  };

  size_t add_param(const std::string& name, std::vector<int> shape);
  StageParams add_stage(const std::string& prefix, int channels);
  void stage_forward(const StageParams& p, StageBufT<T>& buf, const T* temb, int hw,
                     bool keep) const;
  void stage_backward(const StageParams& p, StageBufT<T>& buf, const T* temb, int hw,
                      T* grad) const;

  int features_, side_, depth_, embed_dim_;
  std::vector<ParamInfo> info_;
  std::vector<T> theta_;

  StageParams stem_{};  // only conv1_w/conv1_b used
  std::vector<StageParams> enc_, dec_;
  StageParams mid_{};
  std::vector<size_t> down_w_, down_b_, up_w_, up_b_;
  size_t head_w_ = 0, head_b_ = 0;

  mutable std::shared_ptr<PredictorPool<T>> pool_;
};

using DenoiserModel = DenoiserNet<float>;

// Convenience matching the module contract: depth 2, 128-dim embedding.
DenoiserModel init_model(int init_features, int side, uint64_t seed);

// Versioned binary checkpoint: magic DFCK, header, then per-parameter records
// with little-endian f64 payloads.
template <typename T>
void save_checkpoint(const DenoiserNet<T>& net, const std::filesystem::path& path);

template <typename T>
DenoiserNet<T> load_checkpoint_as(const std::filesystem::path& path);

DenoiserModel load_checkpoint(const std::filesystem::path& path);

}  // namespace fpsynth
