// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

// AVX2/FMA variants. Compiled with -mavx2 -mfma in its own translation unit;
// only reached through the dispatch table after a CPUID check.

#ifdef VOXSYN_WITH_AVX2

#include <immintrin.h>

#include "kernels/kernels.h"

namespace voxsyn::kern {

namespace {

alignas(32) constexpr int kLaneMasks[8][8] = {
    {0, 0, 0, 0, 0, 0, 0, 0},
    {-1, 0, 0, 0, 0, 0, 0, 0},
    {-1, -1, 0, 0, 0, 0, 0, 0},
    {-1, -1, -1, 0, 0, 0, 0, 0},
    {-1, -1, -1, -1, 0, 0, 0, 0},
    {-1, -1, -1, -1, -1, 0, 0, 0},
    {-1, -1, -1, -1, -1, -1, 0, 0},
    {-1, -1, -1, -1, -1, -1, -1, 0},
};

inline double reduce4(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// widen to double before subtracting: float differences would round at
// 2^-24 and drift from the scalar reference
inline void accumulate_sq(__m256 va, __m256 vb, __m256d& acc0, __m256d& acc1) {
    const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                     _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
    const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                     _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
}

double ssd_range(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        accumulate_sq(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0, acc1);
    }
    const std::size_t tail = n - i;
    if (tail) {
        const __m256i m = _mm256_load_si256(reinterpret_cast<const __m256i*>(kLaneMasks[tail]));
        accumulate_sq(_mm256_maskload_ps(a + i, m), _mm256_maskload_ps(b + i, m), acc0, acc1);
    }
    return reduce4(_mm256_add_pd(acc0, acc1));
}

double row_distance_avx2(const float* q, const float* k, std::size_t n_geo, std::size_t n_app,
                         double w_app, double bound) {
    if (bound <= 0.0) return 0.0;
    const double w_geo = 1.0 - w_app;
    double geo = 0.0;
    std::size_t i = 0;
    while (i < n_geo) {
        const std::size_t stop = i + 128 < n_geo ? i + 128 : n_geo;
        geo += ssd_range(q + i, k + i, stop - i);
        i = stop;
        if (w_geo * geo >= bound) return w_geo * geo;
    }
    const double acc = w_geo * geo;
    q += n_geo;
    k += n_geo;
    double app = 0.0;
    i = 0;
    while (i < n_app) {
        const std::size_t stop = i + 128 < n_app ? i + 128 : n_app;
        app += ssd_range(q + i, k + i, stop - i);
        i = stop;
        if (acc + w_app * app >= bound) break;
    }
    return acc + w_app * app;
}

double patch_distance_avx2(const PatchView& q, const PatchView& k, int p, int channels,
                           double w_app, double bound) {
    if (bound <= 0.0) return 0.0;
    const std::size_t row = std::size_t(p);
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
        const float* qc = q.base + std::size_t(c) * q.sc;
        const float* kc = k.base + std::size_t(c) * k.sc;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        if (row <= 8) {
            const __m256i m = _mm256_load_si256(reinterpret_cast<const __m256i*>(kLaneMasks[row & 7]));
            const bool full = row == 8;
            for (int dz = 0; dz < p; ++dz)
                for (int dy = 0; dy < p; ++dy) {
                    const float* qr = qc + std::size_t(dz) * q.sz + std::size_t(dy) * q.sy;
                    const float* kr = kc + std::size_t(dz) * k.sz + std::size_t(dy) * k.sy;
                    const __m256 va = full ? _mm256_loadu_ps(qr) : _mm256_maskload_ps(qr, m);
                    const __m256 vb = full ? _mm256_loadu_ps(kr) : _mm256_maskload_ps(kr, m);
                    accumulate_sq(va, vb, acc0, acc1);
                }
            acc += (c == 0 ? 1.0 - w_app : w_app) * reduce4(_mm256_add_pd(acc0, acc1));
        } else {
            double sum = 0.0;
            for (int dz = 0; dz < p; ++dz)
                for (int dy = 0; dy < p; ++dy) {
                    const float* qr = qc + std::size_t(dz) * q.sz + std::size_t(dy) * q.sy;
                    const float* kr = kc + std::size_t(dz) * k.sz + std::size_t(dy) * k.sy;
                    sum += ssd_range(qr, kr, row);
                }
            acc += (c == 0 ? 1.0 - w_app : w_app) * sum;
        }
        if (acc >= bound) return acc;
    }
    return acc;
}

void min_inplace_avx2(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_loadu_pd(dst + i);
        const __m256d s = _mm256_loadu_pd(src + i);
        _mm256_storeu_pd(dst + i, _mm256_min_pd(d, s));
    }
    for (; i < n; ++i)
        if (src[i] < dst[i]) dst[i] = src[i];
}

void weighted_gather_avx2(const float* const* corners, const double* w, int count, int channels,
                          double* out) {
    int c = 0;
    for (; c + 4 <= channels; c += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int j = 0; j < count; ++j) {
            const __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(corners[j] + c));
            acc = _mm256_fmadd_pd(_mm256_set1_pd(w[j]), v, acc);
        }
        _mm256_storeu_pd(out + c, acc);
    }
    for (; c < channels; ++c) {
        double acc = 0.0;
        for (int j = 0; j < count; ++j) acc += w[j] * double(corners[j][c]);
        out[c] = acc;
    }
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k = {
        "avx2", row_distance_avx2, patch_distance_avx2, min_inplace_avx2, weighted_gather_avx2,
    };
    return k;
}

}  // namespace voxsyn::kern

#endif  // VOXSYN_WITH_AVX2
