// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "nnf/patch.h"

#include <cstring>
#include <limits>

#include "core/parallel.h"
#include "kernels/kernels.h"

namespace voxsyn {

PatchSet extract_patches(const FeatureGrid& volume, int p) {
    if (p < 1) throw UsageError("patch edge must be positive");
    if (volume.dims.x < p || volume.dims.y < p || volume.dims.z < p)
        throw UsageError("volume dims must be >= patch edge on every axis");

    PatchSet set;
    set.grid_dims = volume.dims;
    set.bbox = volume.bbox;
    set.p = p;
    set.channels = volume.channels;
    const Int3 box = set.center_box();
    set.count = box.volume();
    set.feature_dim = volume.channels * p * p * p;
    set.features.resize(std::size_t(set.count) * std::size_t(set.feature_dim));
    set.centers.resize(std::size_t(set.count));

    const Int3 dims = volume.dims;
    const int half = p / 2;
    parallel_chunks(std::size_t(set.count), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 offset = delinearize(box, i);
            set.centers[i] = {offset.x + half, offset.y + half, offset.z + half};
            float* row = set.features.data() + i * std::size_t(set.feature_dim);
            for (int c = 0; c < volume.channels; ++c) {
                const float* plane = volume.plane(c);
                for (int dz = 0; dz < p; ++dz)
                    for (int dy = 0; dy < p; ++dy) {
                        const std::size_t src =
                            linear_index(dims, offset.x, offset.y + dy, offset.z + dz);
                        std::memcpy(row, plane + src, std::size_t(p) * sizeof(float));
                        row += p;
                    }
            }
        }
    });
    return set;
}

double patch_distance(const float* q, const float* k, int p, int channels, double w_a) {
    const std::size_t n_geo = std::size_t(p) * std::size_t(p) * std::size_t(p);
    const std::size_t n_app = n_geo * std::size_t(channels - 1);
    return kern::active_kernels().row_distance(q, k, n_geo, n_app, w_a,
                                               std::numeric_limits<double>::infinity());
}

std::vector<double> completeness_scores(const std::vector<double>& distances, std::int64_t m_q,
                                        std::int64_t m_k, double alpha) {
    if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
    if (distances.size() != std::size_t(m_q) * std::size_t(m_k))
        throw UsageError("distance matrix size mismatch");
    std::vector<double> col_min(std::size_t(m_k), std::numeric_limits<double>::infinity());
    for (std::int64_t i = 0; i < m_q; ++i)
        kern::active_kernels().min_inplace(col_min.data(), distances.data() + i * m_k,
                                           std::size_t(m_k));
    std::vector<double> scores(distances.size());
    for (std::int64_t i = 0; i < m_q; ++i)
        for (std::int64_t j = 0; j < m_k; ++j)
            scores[std::size_t(i * m_k + j)] =
                distances[std::size_t(i * m_k + j)] / (alpha + col_min[std::size_t(j)]);
    return scores;
}

}  // namespace voxsyn
