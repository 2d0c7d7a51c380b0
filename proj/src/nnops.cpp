#include "nnops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "gemm.hpp"

namespace fpsynth {

template <typename T>
void im2col3x3(const T* x, int C, int H, int W, T* col) {
  const size_t plane = static_cast<size_t>(H) * W;
  for (int c = 0; c < C; ++c) {
    const T* xp = x + static_cast<size_t>(c) * plane;
    for (int ky = 0; ky < 3; ++ky) {
      const int dy = ky - 1;
      for (int kx = 0; kx < 3; ++kx) {
        const int dx = kx - 1;
        T* out = col + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * plane;
        for (int y = 0; y < H; ++y) {
          T* row = out + static_cast<size_t>(y) * W;
          const int sy = y + dy;
          if (sy < 0 || sy >= H) {
            std::fill(row, row + W, T(0));
            continue;
          }
          const T* src = xp + static_cast<size_t>(sy) * W;
          if (dx == 0) {
            std::memcpy(row, src, sizeof(T) * W);
          } else if (dx < 0) {
            row[0] = T(0);
            std::memcpy(row + 1, src, sizeof(T) * (W - 1));
          } else {
            std::memcpy(row, src + 1, sizeof(T) * (W - 1));
            row[W - 1] = T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im3x3_acc(const T* col, int C, int H, int W, T* dx) {
  const size_t plane = static_cast<size_t>(H) * W;
  for (int c = 0; c < C; ++c) {
    T* xp = dx + static_cast<size_t>(c) * plane;
    for (int ky = 0; ky < 3; ++ky) {
      const int dy = ky - 1;
      for (int kx = 0; kx < 3; ++kx) {
        const int dx_off = kx - 1;
        const T* in = col + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * plane;
        for (int y = 0; y < H; ++y) {
          const int sy = y + dy;
          if (sy < 0 || sy >= H) continue;
          const T* row = in + static_cast<size_t>(y) * W;
          T* dst = xp + static_cast<size_t>(sy) * W;
          const int x0 = std::max(0, -dx_off);
          const int x1 = W - std::max(0, dx_off);
          for (int xx = x0; xx < x1; ++xx) dst[xx + dx_off] += row[xx];
        }
      }
    }
  }
}

template <typename T>
void conv3x3_forward(const T* x, const T* w, const T* b, T* y, int cin, int cout, int H, int W,
                     T* colbuf) {
  const int hw = H * W;
  im2col3x3(x, cin, H, W, colbuf);
  for (int co = 0; co < cout; ++co)
    std::fill(y + static_cast<size_t>(co) * hw, y + static_cast<size_t>(co + 1) * hw, b[co]);
  gemm_broadcast_acc<T>(cout, hw, cin * 9, w, cin * 9, 1, colbuf, y);
}

template <typename T>
void conv3x3_backward(const T* x, const T* w, const T* dy, T* dx, T* dw_acc, T* db_acc, int cin,
                      int cout, int H, int W, T* colbuf, T* colgrad) {
  const int hw = H * W;
  const int k9 = cin * 9;

  for (int co = 0; co < cout; ++co) {
    const T* d = dy + static_cast<size_t>(co) * hw;
    T s = 0;
    for (int i = 0; i < hw; ++i) s += d[i];
    db_acc[co] += s;
  }

  im2col3x3(x, cin, H, W, colbuf);
  gemm_dot_acc<T>(cout, k9, hw, dy, colbuf, dw_acc);

  // dX via W^T . dY scattered back through the col layout.
  std::fill(colgrad, colgrad + static_cast<size_t>(k9) * hw, T(0));
  gemm_broadcast_acc<T>(k9, hw, cout, w, 1, k9, dy, colgrad);
  std::fill(dx, dx + static_cast<size_t>(cin) * hw, T(0));
  col2im3x3_acc(colgrad, cin, H, W, dx);
}

template <typename T>
void channel_norm_forward(const T* x, const T* gamma, const T* beta, T* y, T* xhat_saved,
                          T* inv_std_saved, int C, int HW) {
  for (int c = 0; c < C; ++c) {
    const T* xc = x + static_cast<size_t>(c) * HW;
    T* yc = y + static_cast<size_t>(c) * HW;
    T* hc = xhat_saved + static_cast<size_t>(c) * HW;
    T mean = 0;
    for (int i = 0; i < HW; ++i) mean += xc[i];
    mean /= static_cast<T>(HW);
    T var = 0;
    for (int i = 0; i < HW; ++i) {
      const T d = xc[i] - mean;
      var += d * d;
    }
    var /= static_cast<T>(HW);
    const T inv_std = T(1) / std::sqrt(var + static_cast<T>(kNormEps));
    inv_std_saved[c] = inv_std;
    const T scale = T(1) + gamma[c];
    for (int i = 0; i < HW; ++i) {
      hc[i] = (xc[i] - mean) * inv_std;
      yc[i] = scale * hc[i] + beta[c];
    }
  }
}

template <typename T>
void channel_norm_backward(const T* dy, const T* xhat, const T* inv_std, const T* gamma, T* dx,
                           T* dgamma_acc, T* dbeta_acc, int C, int HW) {
  for (int c = 0; c < C; ++c) {
    const T* dyc = dy + static_cast<size_t>(c) * HW;
    const T* hc = xhat + static_cast<size_t>(c) * HW;
    T* dxc = dx + static_cast<size_t>(c) * HW;
    T sum_dy = 0, sum_dyh = 0;
    for (int i = 0; i < HW; ++i) {
      sum_dy += dyc[i];
      sum_dyh += dyc[i] * hc[i];
    }
    dbeta_acc[c] += sum_dy;
    dgamma_acc[c] += sum_dyh;
    const T scale = (T(1) + gamma[c]) * inv_std[c];
    const T mean_dy = sum_dy / static_cast<T>(HW);
    const T mean_dyh = sum_dyh / static_cast<T>(HW);
    for (int i = 0; i < HW; ++i) dxc[i] = scale * (dyc[i] - mean_dy - hc[i] * mean_dyh);
  }
}

template <typename T>
void silu_forward(const T* x, T* y, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const T s = T(1) / (T(1) + std::exp(-x[i]));
    y[i] = x[i] * s;
  }
}

template <typename T>
void silu_backward(const T* x, const T* dy, T* dx, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    const T s = T(1) / (T(1) + std::exp(-x[i]));
    dx[i] = dy[i] * (s + x[i] * s * (T(1) - s));
  }
}

template <typename T>
void down2_forward(const T* x, T* y, int C, int H, int W) {
  const int h2 = H / 2, w2 = W / 2;
  for (int c = 0; c < C; ++c) {
    const T* xp = x + static_cast<size_t>(c) * H * W;
    T* yp = y + static_cast<size_t>(c) * h2 * w2;
    for (int i = 0; i < h2; ++i)
      for (int j = 0; j < w2; ++j) yp[static_cast<size_t>(i) * w2 + j] = xp[static_cast<size_t>(2 * i) * W + 2 * j];
  }
}

template <typename T>
void down2_backward(const T* dy, T* dx, int C, int H, int W) {
  const int h2 = H / 2, w2 = W / 2;
  std::fill(dx, dx + static_cast<size_t>(C) * H * W, T(0));
  for (int c = 0; c < C; ++c) {
    const T* dyp = dy + static_cast<size_t>(c) * h2 * w2;
    T* dxp = dx + static_cast<size_t>(c) * H * W;
    for (int i = 0; i < h2; ++i)
      for (int j = 0; j < w2; ++j) dxp[static_cast<size_t>(2 * i) * W + 2 * j] = dyp[static_cast<size_t>(i) * w2 + j];
  }
}

template <typename T>
void up2_forward(const T* x, T* y, int C, int H, int W) {
  const int H2 = 2 * H, W2 = 2 * W;
  for (int c = 0; c < C; ++c) {
    const T* xp = x + static_cast<size_t>(c) * H * W;
    T* yp = y + static_cast<size_t>(c) * H2 * W2;
    for (int i = 0; i < H2; ++i) {
      const T* src = xp + static_cast<size_t>(i / 2) * W;
      T* row = yp + static_cast<size_t>(i) * W2;
      for (int j = 0; j < W2; ++j) row[j] = src[j / 2];
    }
  }
}

template <typename T>
void up2_backward(const T* dy, T* dx, int C, int H, int W) {
  const int H2 = 2 * H, W2 = 2 * W;
  for (int c = 0; c < C; ++c) {
    const T* dyp = dy + static_cast<size_t>(c) * H2 * W2;
    T* dxp = dx + static_cast<size_t>(c) * H * W;
    for (int i = 0; i < H; ++i)
      for (int j = 0; j < W; ++j) {
        const T* r0 = dyp + static_cast<size_t>(2 * i) * W2 + 2 * j;
        const T* r1 = r0 + W2;
        dxp[static_cast<size_t>(i) * W + j] = r0[0] + r0[1] + r1[0] + r1[1];
      }
  }
}

template <typename T>
void linear_forward(const T* x, const T* w, const T* b, T* y, int in_dim, int out_dim) {
  for (int o = 0; o < out_dim; ++o) {
    const T* wr = w + static_cast<size_t>(o) * in_dim;
    T s = b[o];
    for (int i = 0; i < in_dim; ++i) s += wr[i] * x[i];
    y[o] = s;
  }
}

template <typename T>
void linear_backward_params(const T* x, const T* dy, T* dw_acc, T* db_acc, int in_dim,
                            int out_dim) {
  for (int o = 0; o < out_dim; ++o) {
    db_acc[o] += dy[o];
    T* wr = dw_acc + static_cast<size_t>(o) * in_dim;
    for (int i = 0; i < in_dim; ++i) wr[i] += dy[o] * x[i];
  }
}

template <typename T>
void time_embedding(int t, int dim, T* out) {
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    const double freq = std::exp(-std::log(10000.0) * k / std::max(1, half - 1));
    out[k] = static_cast<T>(std::sin(t * freq));
    out[half + k] = static_cast<T>(std::cos(t * freq));
  }
}

#define FPSYNTH_INSTANTIATE(T)                                                             \
  template void im2col3x3<T>(const T*, int, int, int, T*);                                 \
  template void col2im3x3_acc<T>(const T*, int, int, int, T*);                             \
  template void conv3x3_forward<T>(const T*, const T*, const T*, T*, int, int, int, int,   \
                                   T*);                                                    \
  template void conv3x3_backward<T>(const T*, const T*, const T*, T*, T*, T*, int, int,    \
                                    int, int, T*, T*);                                     \
  template void channel_norm_forward<T>(const T*, const T*, const T*, T*, T*, T*, int,     \
                                        int);                                              \
  template void channel_norm_backward<T>(const T*, const T*, const T*, const T*, T*, T*,   \
                                         T*, int, int);                                    \
  template void silu_forward<T>(const T*, T*, size_t);                                     \
  template void silu_backward<T>(const T*, const T*, T*, size_t);                          \
  template void down2_forward<T>(const T*, T*, int, int, int);                             \
  template void down2_backward<T>(const T*, T*, int, int, int);                            \
  template void up2_forward<T>(const T*, T*, int, int, int);                               \
  template void up2_backward<T>(const T*, T*, int, int, int);                              \
  template void linear_forward<T>(const T*, const T*, const T*, T*, int, int);             \
  template void linear_backward_params<T>(const T*, const T*, T*, T*, int, int);           \
  template void time_embedding<T>(int, int, T*);

FPSYNTH_INSTANTIATE(float)
FPSYNTH_INSTANTIATE(double)
#undef FPSYNTH_INSTANTIATE

}  // namespace fpsynth
