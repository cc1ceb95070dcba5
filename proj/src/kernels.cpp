#include "shadow/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define SHADOW_HAS_AVX2_PATH 1
#else
#define SHADOW_HAS_AVX2_PATH 0
#endif

namespace shadow::kernels {

namespace scalar {

void axpy(float* y, const float* x, std::size_t n, float a) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy(double* y, const double* x, std::size_t n, double a) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

float dot(const float* x, const float* y, std::size_t n) {
    float acc = 0.f;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

}  // namespace scalar

#if SHADOW_HAS_AVX2_PATH
namespace avx2 {

__attribute__((target("avx2,fma"))) void axpy(float* y, const float* x, std::size_t n, float a) {
    const __m256 va = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 vy = _mm256_loadu_ps(y + i);
        vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
        _mm256_storeu_ps(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) void axpy(double* y, const double* x, std::size_t n, double a) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) float dot(const float* x, const float* y, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8)
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc0);
    acc0 = _mm256_add_ps(acc0, acc1);
    __m128 lo = _mm256_castps256_ps128(acc0);
    __m128 hi = _mm256_extractf128_ps(acc0, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_hadd_ps(lo, lo);
    lo = _mm_hadd_ps(lo, lo);
    float acc = _mm_cvtss_f32(lo);
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

__attribute__((target("avx2,fma"))) double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc0 = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc0);
    __m128d hi = _mm256_extractf128_pd(acc0, 1);
    lo = _mm_add_pd(lo, hi);
    double acc = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

}  // namespace avx2
#endif  // SHADOW_HAS_AVX2_PATH

bool avx2_available() {
#if SHADOW_HAS_AVX2_PATH
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
const bool use_avx2 = avx2_available();
}

const char* active_backend() { return use_avx2 ? "avx2" : "scalar"; }

void axpy(float* y, const float* x, std::size_t n, float a) {
#if SHADOW_HAS_AVX2_PATH
    if (use_avx2) return avx2::axpy(y, x, n, a);
#endif
    scalar::axpy(y, x, n, a);
}

void axpy(double* y, const double* x, std::size_t n, double a) {
#if SHADOW_HAS_AVX2_PATH
    if (use_avx2) return avx2::axpy(y, x, n, a);
#endif
    scalar::axpy(y, x, n, a);
}

float dot(const float* x, const float* y, std::size_t n) {
#if SHADOW_HAS_AVX2_PATH
    if (use_avx2) return avx2::dot(x, y, n);
#endif
    return scalar::dot(x, y, n);
}

double dot(const double* x, const double* y, std::size_t n) {
#if SHADOW_HAS_AVX2_PATH
    if (use_avx2) return avx2::dot(x, y, n);
#endif
    return scalar::dot(x, y, n);
}

}  // namespace shadow::kernels
