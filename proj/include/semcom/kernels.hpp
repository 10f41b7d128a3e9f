#pragma once
// Dense numeric kernels used by the Q-network training loop, with a scalar
// reference implementation and an AVX2 variant selected at runtime.
//
// Both backends are required to produce BIT-IDENTICAL results: the vector
// variants parallelize only across independent output elements and keep the
// per-element operation order (multiply, then add; no FMA contraction) equal
// to the scalar loops. Equivalence is enforced by tests/test_kernels.cpp.

#include <cstddef>
#include <cstdint>
#include <string>

namespace semcom::kernels {

// dst[j] += sum_i w[i*out_dim + j] * x[i]   (weights stored input-major)
using MatvecOutFn = void (*)(double* dst, const double* w, const double* x,
                             std::size_t in_dim, std::size_t out_dim);

// dst[i] += sum_j w[i*out_dim + j] * g[j]
using MatvecInFn = void (*)(double* dst, const double* w, const double* g,
                            std::size_t in_dim, std::size_t out_dim);

// w[i*out_dim + j] += scale * x[i] * g[j]
using OuterFn = void (*)(double* w, const double* x, const double* g,
                         double scale, std::size_t in_dim, std::size_t out_dim);

// v[i] = max(v[i], 0)
using ReluFn = void (*)(double* v, std::size_t n);

struct AdamConsts {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias1;  // 1 - beta1^t
  double bias2;  // 1 - beta2^t
};

// m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g;
// p -= lr * (m/bias1) / (sqrt(v/bias2) + eps)
using AdamFn = void (*)(double* p, double* m, double* v, const double* g,
                        std::size_t n, const AdamConsts& c);

struct KernelTable {
  MatvecOutFn matvec_out_accum;
  MatvecInFn matvec_in_accum;
  OuterFn outer_accum;
  ReluFn relu_inplace;
  AdamFn adam_update;
  const char* name;
};

namespace scalar {
extern const KernelTable table;
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable table;  // callable only if cpu_has_avx2()
}
bool cpu_has_avx2();
#endif

// Active table. Selected once on first use: AVX2 when the CPU supports it,
// scalar otherwise. The SEMCOM_SIMD environment variable ("scalar" or
// "avx2") overrides the automatic choice.
const KernelTable& active();

// Force a backend by name; returns false if unavailable. Used by tests.
bool select_backend(const std::string& name);

inline const char* backend_name() { return active().name; }

}  // namespace semcom::kernels
