#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "common.hpp"

namespace fpsynth {

// Plain dense tensor: values plus an optional same-shaped gradient buffer.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> v;
  std::vector<T> g;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    v.assign(count(), T(0));
  }

  size_t count() const {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
  }
  void ensure_grad() {
    if (g.size() != v.size()) g.assign(v.size(), T(0));
  }
  void zero_grad() { std::fill(g.begin(), g.end(), T(0)); }
};

// The operation set of the differentiation engine: 3x3 same-convolution,
// nearest 2x up/down sampling, per-channel scale-shift normalization, SiLU,
// add, and a dense linear map. Each op ships its reverse-mode backward;
// correctness is pinned by the finite-difference suite.

// -- conv 3x3, zero padding 1, stride 1 ------------------------------------
// col buffer layout: col[(c*9 + ky*3 + kx) * (H*W) + y*W + x] = x[c][y+ky-1][x+kx-1]

template <typename T>
void im2col3x3(const T* x, int C, int H, int W, T* col);

template <typename T>
void col2im3x3_acc(const T* col, int C, int H, int W, T* dx);

// y[cout] = b[cout] + sum_cin w * x. colbuf must hold C_in*9*H*W values.
template <typename T>
void conv3x3_forward(const T* x, const T* w, const T* b, T* y, int cin, int cout, int H, int W,
                     T* colbuf);

// Accumulates dw/db, overwrites dx. colbuf/colgrad each hold C_in*9*H*W.
template <typename T>
void conv3x3_backward(const T* x, const T* w, const T* dy, T* dx, T* dw_acc, T* db_acc, int cin,
                      int cout, int H, int W, T* colbuf, T* colgrad);

// -- per-channel normalization ----------------------------------------------
// y = (1 + gamma_c) * (x - mean_c) / sqrt(var_c + eps) + beta_c, statistics
// taken over the H*W plane of each channel (per sample, so batch members
// never couple). xhat and inv_std are saved for the backward pass.

inline constexpr double kNormEps = 1e-5;

template <typename T>
void channel_norm_forward(const T* x, const T* gamma, const T* beta, T* y, T* xhat_saved,
                          T* inv_std_saved, int C, int HW);

template <typename T>
void channel_norm_backward(const T* dy, const T* xhat, const T* inv_std, const T* gamma, T* dx,
                           T* dgamma_acc, T* dbeta_acc, int C, int HW);

// -- smooth nonlinearity x * sigmoid(x) --------------------------------------

template <typename T>
void silu_forward(const T* x, T* y, size_t n);

template <typename T>
void silu_backward(const T* x, const T* dy, T* dx, size_t n);

// -- nearest-neighbor 2x resampling ------------------------------------------

template <typename T>
void down2_forward(const T* x, T* y, int C, int H, int W);  // y is C x H/2 x W/2

template <typename T>
void down2_backward(const T* dy, T* dx, int C, int H, int W);  // dx overwritten

template <typename T>
void up2_forward(const T* x, T* y, int C, int H, int W);  // y is C x 2H x 2W

template <typename T>
void up2_backward(const T* dy, T* dx, int C, int H, int W);  // dx overwritten

// -- dense linear map (timestep-embedding projections) ------------------------

template <typename T>
void linear_forward(const T* x, const T* w, const T* b, T* y, int in_dim, int out_dim);

// Gradient w.r.t. parameters only (the embedding input carries no parameters).
template <typename T>
void linear_backward_params(const T* x, const T* dy, T* dw_acc, T* db_acc, int in_dim,
                            int out_dim);

// -- sinusoidal timestep embedding --------------------------------------------
// dim/2 sin components followed by dim/2 cos components, geometric frequency
// ladder from 1 down to 1/10000.

template <typename T>
void time_embedding(int t, int dim, T* out);

}  // namespace fpsynth
