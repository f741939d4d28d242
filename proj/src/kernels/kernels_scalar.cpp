// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "kernels/kernels.h"

namespace voxsyn::kern {

namespace {

double row_distance_scalar(const float* q, const float* k, std::size_t n_geo, std::size_t n_app,
                           double w_app, double bound) {
    if (bound <= 0.0) return 0.0;  // non-negative sums can never stay below
    const double w_geo = 1.0 - w_app;
    double geo = 0.0;
    std::size_t i = 0;
    while (i < n_geo) {
        const std::size_t stop = i + 128 < n_geo ? i + 128 : n_geo;
        for (; i < stop; ++i) {
            const double d = double(q[i]) - double(k[i]);
            geo += d * d;
        }
        if (w_geo * geo >= bound) return w_geo * geo;
    }
    const double acc = w_geo * geo;
    q += n_geo;
    k += n_geo;
    double app = 0.0;
    i = 0;
    while (i < n_app) {
        const std::size_t stop = i + 128 < n_app ? i + 128 : n_app;
        for (; i < stop; ++i) {
            const double d = double(q[i]) - double(k[i]);
            app += d * d;
        }
        if (acc + w_app * app >= bound) break;
    }
    return acc + w_app * app;
}

double patch_distance_scalar(const PatchView& q, const PatchView& k, int p, int channels,
                             double w_app, double bound) {
    if (bound <= 0.0) return 0.0;
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
        double sum = 0.0;
        const float* qc = q.base + std::size_t(c) * q.sc;
        const float* kc = k.base + std::size_t(c) * k.sc;
        for (int dz = 0; dz < p; ++dz)
            for (int dy = 0; dy < p; ++dy) {
                const float* qr = qc + std::size_t(dz) * q.sz + std::size_t(dy) * q.sy;
                const float* kr = kc + std::size_t(dz) * k.sz + std::size_t(dy) * k.sy;
                for (int dx = 0; dx < p; ++dx) {
                    const double d = double(qr[dx]) - double(kr[dx]);
                    sum += d * d;
                }
            }
        acc += (c == 0 ? 1.0 - w_app : w_app) * sum;
        if (acc >= bound) return acc;
    }
    return acc;
}

void min_inplace_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (src[i] < dst[i]) dst[i] = src[i];
}

void weighted_gather_scalar(const float* const* corners, const double* w, int count, int channels,
                            double* out) {
    for (int c = 0; c < channels; ++c) out[c] = 0.0;
    for (int j = 0; j < count; ++j) {
        const float* v = corners[j];
        const double wj = w[j];
        for (int c = 0; c < channels; ++c) out[c] += wj * double(v[c]);
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar", row_distance_scalar, patch_distance_scalar, min_inplace_scalar,
        weighted_gather_scalar,
    };
    return k;
}

}  // namespace voxsyn::kern
