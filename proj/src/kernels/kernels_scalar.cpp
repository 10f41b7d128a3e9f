// Reference kernels. These define the numeric contract: the SIMD variants
// must reproduce them bit-for-bit, so keep the loop order and the
// multiply/add sequencing exactly as written.

#include "semcom/kernels.hpp"

#include <cmath>

namespace semcom::kernels::scalar {

namespace {

void matvec_out_accum(double* dst, const double* w, const double* x,
                      std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t i = 0; i < in_dim; ++i) {
    const double xi = x[i];
    const double* row = w + i * out_dim;
    for (std::size_t j = 0; j < out_dim; ++j) {
      dst[j] += row[j] * xi;
    }
  }
}

void matvec_in_accum(double* dst, const double* w, const double* g,
                     std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t i = 0; i < in_dim; ++i) {
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
    double* row = w + i * out_dim;
    for (std::size_t j = 0; j < out_dim; ++j) {
      row[j] += sx * g[j];
    }
  }
}

void relu_inplace(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = v[i] > 0.0 ? v[i] : 0.0;
  }
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, const AdamConsts& c) {
  const double one_m_b1 = 1.0 - c.beta1;
  const double one_m_b2 = 1.0 - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
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
    "scalar",
};

}  // namespace semcom::kernels::scalar
