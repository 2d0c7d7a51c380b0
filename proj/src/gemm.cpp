#include "gemm.hpp"

#include <algorithm>
#include <cstddef>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace fpsynth {

namespace {

template <typename T>
void gemm_broadcast_generic(int M, int N, int K, const T* A, int ars, int acs, const T* B, T* C) {
  int m = 0;
  for (; m + 4 <= M; m += 4) {
    T* __restrict c0 = C + static_cast<size_t>(m) * N;
    T* __restrict c1 = c0 + N;
    T* __restrict c2 = c1 + N;
    T* __restrict c3 = c2 + N;
    for (int k = 0; k < K; ++k) {
      const T w0 = A[static_cast<size_t>(m) * ars + static_cast<size_t>(k) * acs];
      const T w1 = A[static_cast<size_t>(m + 1) * ars + static_cast<size_t>(k) * acs];
      const T w2 = A[static_cast<size_t>(m + 2) * ars + static_cast<size_t>(k) * acs];
      const T w3 = A[static_cast<size_t>(m + 3) * ars + static_cast<size_t>(k) * acs];
      const T* __restrict b = B + static_cast<size_t>(k) * N;
      for (int n = 0; n < N; ++n) {
        c0[n] += w0 * b[n];
        c1[n] += w1 * b[n];
        c2[n] += w2 * b[n];
        c3[n] += w3 * b[n];
      }
    }
  }
  for (; m < M; ++m) {
    T* __restrict c0 = C + static_cast<size_t>(m) * N;
    for (int k = 0; k < K; ++k) {
      const T w0 = A[static_cast<size_t>(m) * ars + static_cast<size_t>(k) * acs];
      const T* __restrict b = B + static_cast<size_t>(k) * N;
      for (int n = 0; n < N; ++n) c0[n] += w0 * b[n];
    }
  }
}

template <typename T>
void gemm_dot_generic(int M, int N, int K, const T* A, const T* B, T* C) {
  for (int m = 0; m < M; ++m) {
    const T* __restrict a = A + static_cast<size_t>(m) * K;
    for (int n = 0; n < N; ++n) {
      const T* __restrict b = B + static_cast<size_t>(n) * K;
      T s = 0;
      for (int k = 0; k < K; ++k) s += a[k] * b[k];
      C[static_cast<size_t>(m) * N + n] += s;
    }
  }
}

#if defined(__AVX512F__)

// 8x32 register tile; N tail handled with masked loads/stores.
void gemm_broadcast_f32_avx512(int M, int N, int K, const float* A, int ars, int acs,
                               const float* B, float* C) {
  const auto a_at = [&](int m, int k) -> float {
    return A[static_cast<size_t>(m) * ars + static_cast<size_t>(k) * acs];
  };
  int m = 0;
  for (; m + 8 <= M; m += 8) {
    int n = 0;
    for (; n + 32 <= N; n += 32) {
      __m512 acc[8][2];
      for (int i = 0; i < 8; ++i) {
        float* c = C + static_cast<size_t>(m + i) * N + n;
        acc[i][0] = _mm512_loadu_ps(c);
        acc[i][1] = _mm512_loadu_ps(c + 16);
      }
      for (int k = 0; k < K; ++k) {
        const float* b = B + static_cast<size_t>(k) * N + n;
        const __m512 b0 = _mm512_loadu_ps(b);
        const __m512 b1 = _mm512_loadu_ps(b + 16);
        for (int i = 0; i < 8; ++i) {
          const __m512 a = _mm512_set1_ps(a_at(m + i, k));
          acc[i][0] = _mm512_fmadd_ps(a, b0, acc[i][0]);
          acc[i][1] = _mm512_fmadd_ps(a, b1, acc[i][1]);
        }
      }
      for (int i = 0; i < 8; ++i) {
        float* c = C + static_cast<size_t>(m + i) * N + n;
        _mm512_storeu_ps(c, acc[i][0]);
        _mm512_storeu_ps(c + 16, acc[i][1]);
      }
    }
    for (; n < N; n += 16) {
      const __mmask16 mask = static_cast<__mmask16>((1u << std::min(16, N - n)) - 1u);
      __m512 acc[8];
      for (int i = 0; i < 8; ++i)
        acc[i] = _mm512_maskz_loadu_ps(mask, C + static_cast<size_t>(m + i) * N + n);
      for (int k = 0; k < K; ++k) {
        const __m512 b0 = _mm512_maskz_loadu_ps(mask, B + static_cast<size_t>(k) * N + n);
        for (int i = 0; i < 8; ++i)
          acc[i] = _mm512_fmadd_ps(_mm512_set1_ps(a_at(m + i, k)), b0, acc[i]);
      }
      for (int i = 0; i < 8; ++i)
        _mm512_mask_storeu_ps(C + static_cast<size_t>(m + i) * N + n, mask, acc[i]);
    }
  }
  // Remaining rows.
  for (; m < M; ++m) {
    int n = 0;
    for (; n < N; n += 16) {
      const __mmask16 mask = static_cast<__mmask16>((1u << std::min(16, N - n)) - 1u);
      __m512 acc = _mm512_maskz_loadu_ps(mask, C + static_cast<size_t>(m) * N + n);
      for (int k = 0; k < K; ++k) {
        const __m512 b0 = _mm512_maskz_loadu_ps(mask, B + static_cast<size_t>(k) * N + n);
        acc = _mm512_fmadd_ps(_mm512_set1_ps(a_at(m, k)), b0, acc);
      }
      _mm512_mask_storeu_ps(C + static_cast<size_t>(m) * N + n, mask, acc);
    }
  }
}

void gemm_dot_f32_avx512(int M, int N, int K, const float* A, const float* B, float* C) {
  // 4x4 tile of dot products, vectorized over K.
  int m = 0;
  for (; m + 4 <= M; m += 4) {
    int n = 0;
    for (; n + 4 <= N; n += 4) {
      __m512 acc[4][4];
      for (auto& row : acc)
        for (auto& v : row) v = _mm512_setzero_ps();
      int k = 0;
      for (; k + 16 <= K; k += 16) {
        __m512 a[4], b[4];
        for (int i = 0; i < 4; ++i) a[i] = _mm512_loadu_ps(A + static_cast<size_t>(m + i) * K + k);
        for (int j = 0; j < 4; ++j) b[j] = _mm512_loadu_ps(B + static_cast<size_t>(n + j) * K + k);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) acc[i][j] = _mm512_fmadd_ps(a[i], b[j], acc[i][j]);
      }
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          float s = _mm512_reduce_add_ps(acc[i][j]);
          for (int kk = k; kk < K; ++kk)
            s += A[static_cast<size_t>(m + i) * K + kk] * B[static_cast<size_t>(n + j) * K + kk];
          C[static_cast<size_t>(m + i) * N + n + j] += s;
        }
    }
    for (; n < N; ++n)
      for (int i = 0; i < 4; ++i) {
        const float* a = A + static_cast<size_t>(m + i) * K;
        const float* b = B + static_cast<size_t>(n) * K;
        float s = 0;
        for (int k = 0; k < K; ++k) s += a[k] * b[k];
        C[static_cast<size_t>(m + i) * N + n] += s;
      }
  }
  for (; m < M; ++m)
    for (int n = 0; n < N; ++n) {
      const float* a = A + static_cast<size_t>(m) * K;
      const float* b = B + static_cast<size_t>(n) * K;
      float s = 0;
      for (int k = 0; k < K; ++k) s += a[k] * b[k];
      C[static_cast<size_t>(m) * N + n] += s;
    }
}

#endif  // __AVX512F__

}  // namespace

template <typename T>
void gemm_broadcast_acc(int M, int N, int K, const T* A, int ars, int acs, const T* B, T* C) {
  gemm_broadcast_generic(M, N, K, A, ars, acs, B, C);
}

template <typename T>
void gemm_dot_acc(int M, int N, int K, const T* A, const T* B, T* C) {
  gemm_dot_generic(M, N, K, A, B, C);
}

#if defined(__AVX512F__)
template <>
void gemm_broadcast_acc<float>(int M, int N, int K, const float* A, int ars, int acs,
                               const float* B, float* C) {
  gemm_broadcast_f32_avx512(M, N, K, A, ars, acs, B, C);
}

template <>
void gemm_dot_acc<float>(int M, int N, int K, const float* A, const float* B, float* C) {
  gemm_dot_f32_avx512(M, N, K, A, B, C);
}
#else
template void gemm_broadcast_acc<float>(int, int, int, const float*, int, int, const float*,
                                        float*);
template void gemm_dot_acc<float>(int, int, int, const float*, const float*, float*);
#endif

template void gemm_broadcast_acc<double>(int, int, int, const double*, int, int, const double*,
                                         double*);
template void gemm_dot_acc<double>(int, int, int, const double*, const double*, double*);

}  // namespace fpsynth
