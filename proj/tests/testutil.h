// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <vector>

#include "core/grid.h"
#include "core/rng.h"
#include "nnf/patch.h"

namespace voxsyn::testutil {

// random channel-planar volume with values in [lo, hi]
inline FeatureGrid random_volume(Int3 dims, int channels, std::uint64_t seed, double lo = -1.0,
                                 double hi = 1.0) {
    FeatureGrid vol = make_feature_grid(dims, normalized_bbox(dims), channels);
    Rng rng(seed);
    for (auto& v : vol.data) v = float(lo + (hi - lo) * rng.uniform());
    return vol;
}

inline std::vector<float> random_floats(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                        double hi = 1.0) {
    std::vector<float> out(n);
    Rng rng(seed);
    for (auto& v : out) v = float(lo + (hi - lo) * rng.uniform());
    return out;
}

// Independent brute-force reference for the exact solver: full distance
// matrix from the documented feature-row layout, plain double loops.
inline std::vector<double> oracle_distances(const PatchSet& q, const PatchSet& k, double w_a) {
    const int p3 = q.p * q.p * q.p;
    std::vector<double> d(std::size_t(q.count) * std::size_t(k.count));
    for (std::int64_t i = 0; i < q.count; ++i)
        for (std::int64_t j = 0; j < k.count; ++j) {
            const float* qr = q.row(i);
            const float* kr = k.row(j);
            double geo = 0.0, app = 0.0;
            for (int c = 0; c < p3; ++c) {
                const double diff = double(qr[c]) - double(kr[c]);
                geo += diff * diff;
            }
            for (int c = p3; c < q.feature_dim; ++c) {
                const double diff = double(qr[c]) - double(kr[c]);
                app += diff * diff;
            }
            d[std::size_t(i * k.count + j)] = w_a * app + (1.0 - w_a) * geo;
        }
    return d;
}

// argmin over completeness scores with the engine's tie-break contract:
// smaller score, then nearer key center, then smaller index.
inline std::vector<std::int64_t> oracle_assignment(const PatchSet& q, const PatchSet& k, double w_a,
                                                   double alpha) {
    const auto d = oracle_distances(q, k, w_a);
    std::vector<double> col_min(std::size_t(k.count), 1e300);
    for (std::int64_t i = 0; i < q.count; ++i)
        for (std::int64_t j = 0; j < k.count; ++j)
            col_min[std::size_t(j)] =
                std::min(col_min[std::size_t(j)], d[std::size_t(i * k.count + j)]);

    std::vector<std::int64_t> out(std::size_t(q.count));
    for (std::int64_t i = 0; i < q.count; ++i) {
        double best_score = 1e300, best_c2 = 1e300;
        std::int64_t best_j = -1;
        const Vec3 qc = q.center_world(i);
        for (std::int64_t j = 0; j < k.count; ++j) {
            const double score = d[std::size_t(i * k.count + j)] / (alpha + col_min[std::size_t(j)]);
            const double c2 = norm2(k.center_world(j) - qc);
            if (score < best_score || (score == best_score && c2 < best_c2)) {
                best_score = score;
                best_c2 = c2;
                best_j = j;
            }
        }
        out[std::size_t(i)] = best_j;
    }
    return out;
}

}  // namespace voxsyn::testutil
