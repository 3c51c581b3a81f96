#pragma once

#include <algorithm>
#include <cstddef>

namespace csgan::kernels {

// C[M x N] += A[M x K] * B[K x N], all row-major, contiguous leading dims.
// Register-tiled (MR x NR) with OpenMP over row tiles; the inner j-loop
// vectorizes under -O3 -march=native.
template <typename T>
void gemm_acc(int M, int N, int K, const T* A, const T* B, T* C) {
  constexpr int MR = 4;
  constexpr int NR = 16;

#pragma omp parallel for schedule(static)
  for (int i0 = 0; i0 < M; i0 += MR) {
    const int mi = std::min(MR, M - i0);
    for (int j0 = 0; j0 < N; j0 += NR) {
      const int nj = std::min(NR, N - j0);
      if (mi == MR && nj == NR) {
        T acc[MR][NR] = {};
        for (int k = 0; k < K; ++k) {
          const T* brow = B + static_cast<size_t>(k) * N + j0;
          for (int a = 0; a < MR; ++a) {
            const T av = A[static_cast<size_t>(i0 + a) * K + k];
#pragma omp simd
            for (int b = 0; b < NR; ++b) acc[a][b] += av * brow[b];
          }
        }
        for (int a = 0; a < MR; ++a) {
          T* crow = C + static_cast<size_t>(i0 + a) * N + j0;
#pragma omp simd
          for (int b = 0; b < NR; ++b) crow[b] += acc[a][b];
        }
      } else {
        for (int a = 0; a < mi; ++a) {
          T* crow = C + static_cast<size_t>(i0 + a) * N + j0;
          const T* arow = A + static_cast<size_t>(i0 + a) * K;
          for (int k = 0; k < K; ++k) {
            const T av = arow[k];
            const T* brow = B + static_cast<size_t>(k) * N + j0;
            for (int b = 0; b < nj; ++b) crow[b] += av * brow[b];
          }
        }
      }
    }
  }
}

// C = A * B (overwrite).
template <typename T>
void gemm(int M, int N, int K, const T* A, const T* B, T* C) {
  std::fill(C, C + static_cast<size_t>(M) * N, T(0));
  gemm_acc(M, N, K, A, B, C);
}

namespace ref {

// Serial triple loop, kept as the oracle for the tiled kernel.
template <typename T>
void gemm(int M, int N, int K, const T* A, const T* B, T* C) {
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) {
      T s = 0;
      for (int k = 0; k < K; ++k)
        s += A[static_cast<size_t>(i) * K + k] * B[static_cast<size_t>(k) * N + j];
      C[static_cast<size_t>(i) * N + j] = s;
    }
}

}  // namespace ref

}  // namespace csgan::kernels
