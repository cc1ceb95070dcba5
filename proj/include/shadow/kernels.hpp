#pragma once
// Inner-loop arithmetic kernels behind conv2d and the optimizer: scalar
// reference implementations plus AVX2+FMA variants selected once at runtime.
// The dispatched entry points are what the rest of the code calls; the
// per-backend namespaces stay visible so tests can check cross-path agreement.

#include <cstddef>

namespace shadow::kernels {

namespace scalar {
void axpy(float* y, const float* x, std::size_t n, float a);
void axpy(double* y, const double* x, std::size_t n, double a);
float dot(const float* x, const float* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void axpy(float* y, const float* x, std::size_t n, float a);
void axpy(double* y, const double* x, std::size_t n, double a);
float dot(const float* x, const float* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
}  // namespace avx2
#endif

// dispatched entry points: y += a*x and sum(x*y)
void axpy(float* y, const float* x, std::size_t n, float a);
void axpy(double* y, const double* x, std::size_t n, double a);
float dot(const float* x, const float* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

/// Name of the backend the dispatched entry points resolve to ("avx2" or "scalar").
const char* active_backend();

/// True when the AVX2 path is compiled in and the CPU supports it.
bool avx2_available();

}  // namespace shadow::kernels
