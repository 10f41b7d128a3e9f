// AVX2 kernels. Vector lanes cover independent output elements only, so every
// lane executes the same multiply/add sequence as the scalar reference and the
// results match it bit-for-bit. Compiled with -mavx2 -ffp-contract=off (no
// FMA; fused ops would round differently from the reference).

#if defined(__x86_64__) || defined(_M_X64)

#include "semcom/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace semcom::kernels::avx2 {

namespace {

void matvec_out_accum(double* dst, const double* w, const double* x,
                      std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t i = 0; i < in_dim; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    const double* row = w + i * out_dim;
    std::size_t j = 0;
    for (; j + 4 <= out_dim; j += 4) {
      __m256d acc = _mm256_loadu_pd(dst + j);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(row + j), xi));
      _mm256_storeu_pd(dst + j, acc);
    }
    const double xs = x[i];
    for (; j < out_dim; ++j) {
      dst[j] += row[j] * xs;
    }
  }
}

void matvec_in_accum(double* dst, const double* w, const double* g,
                     std::size_t in_dim, std::size_t out_dim) {
  std::size_t i = 0;
  for (; i + 4 <= in_dim; i += 4) {
    __m256d acc = _mm256_loadu_pd(dst + i);
    const double* r0 = w + (i + 0) * out_dim;
    const double* r1 = w + (i + 1) * out_dim;
    const double* r2 = w + (i + 2) * out_dim;
    const double* r3 = w + (i + 3) * out_dim;
    for (std::size_t j = 0; j < out_dim; ++j) {
      const __m256d col = _mm256_set_pd(r3[j], r2[j], r1[j], r0[j]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col, _mm256_set1_pd(g[j])));
    }
    _mm256_storeu_pd(dst + i, acc);
  }
  for (; i < in_dim; ++i) {
    const double* row = w + i * out_dim;
    double acc = dst[i];
    for (std::size_t j = 0; j < out_dim; ++j) {
      acc += row[j] * g[j];
    }
    dst[i] = acc;
  }
}

void outer_accum(double* w, const double* x, const double* g, double scale,
                 std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t i = 0; i < in_dim; ++i) {
    const double sx = scale * x[i];
    const __m256d vsx = _mm256_set1_pd(sx);
    double* row = w + i * out_dim;
    std::size_t j = 0;
    for (; j + 4 <= out_dim; j += 4) {
      __m256d acc = _mm256_loadu_pd(row + j);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(vsx, _mm256_loadu_pd(g + j)));
      _mm256_storeu_pd(row + j, acc);
    }
    for (; j < out_dim; ++j) {
      row[j] += sx * g[j];
    }
  }
}

void relu_inplace(double* v, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(v + i, _mm256_max_pd(_mm256_loadu_pd(v + i), zero));
  }
  for (; i < n; ++i) {
    v[i] = v[i] > 0.0 ? v[i] : 0.0;
  }
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, const AdamConsts& c) {
  const double one_m_b1 = 1.0 - c.beta1;
  const double one_m_b2 = 1.0 - c.beta2;
  const __m256d vb1 = _mm256_set1_pd(c.beta1);
  const __m256d vb2 = _mm256_set1_pd(c.beta2);
  const __m256d v1mb1 = _mm256_set1_pd(one_m_b1);
  const __m256d v1mb2 = _mm256_set1_pd(one_m_b2);
  const __m256d vbias1 = _mm256_set1_pd(c.bias1);
  const __m256d vbias2 = _mm256_set1_pd(c.bias2);
  const __m256d vlr = _mm256_set1_pd(c.lr);
  const __m256d veps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(v1mb1, gi));
    const __m256d vi =
        _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                      _mm256_mul_pd(v1mb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_div_pd(mi, vbias1);
    const __m256d vhat = _mm256_div_pd(vi, vbias2);
    const __m256d step =
        _mm256_mul_pd(vlr, _mm256_div_pd(mhat, _mm256_add_pd(_mm256_sqrt_pd(vhat), veps)));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    const double mi = c.beta1 * m[i] + one_m_b1 * gi;
    const double vi = c.beta2 * v[i] + one_m_b2 * (gi * gi);
    m[i] = mi;
    v[i] = vi;
    const double mhat = mi / c.bias1;
    const double vhat = vi / c.bias2;
    p[i] = p[i] - c.lr * (mhat / (std::sqrt(vhat) + c.eps));
  }
}

}  // namespace

const KernelTable table = {
    matvec_out_accum, matvec_in_accum, outer_accum, relu_inplace, adam_update,
    "avx2",
};

}  // namespace semcom::kernels::avx2

#endif  // x86_64
