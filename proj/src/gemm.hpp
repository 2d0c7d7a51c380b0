#pragma once

namespace fpsynth {

// Accumulating matrix kernels used by the conv / linear layers. Shapes are
// small and fixed per layer, so these are simple register-tiled loops rather
// than a full BLAS; the float instantiation has an AVX-512 path.

// C[M x N] += A . B  where A is addressed as A[m*ars + k*acs] (covers both
// A and A^T layouts), B is row-major [K x N], C is row-major [M x N].
template <typename T>
void gemm_broadcast_acc(int M, int N, int K, const T* A, int ars, int acs, const T* B, T* C);

// C[M x N] += A[M x K] . B[N x K]^T  (rows of both operands are contiguous,
// each C entry is a dot product over K).
template <typename T>
void gemm_dot_acc(int M, int N, int K, const T* A, const T* B, T* C);

}  // namespace fpsynth
