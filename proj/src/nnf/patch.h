// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "core/grid.h"

namespace voxsyn {

// Flattened p^3 neighborhoods with stride-1 centers, channel-major then
// x-fastest, in lexicographic (x-fastest) center order.
struct PatchSet {
    Int3 grid_dims;
    BBox bbox;
    int p = 0;
    int channels = 0;
    std::int64_t count = 0;    // M = prod(D_i - p + 1)
    int feature_dim = 0;       // channels * p^3
    std::vector<float> features;  // M x feature_dim
    std::vector<Int3> centers;    // voxel index of each patch center

    // Dims of the patch-center lattice.
    Int3 center_box() const { return {grid_dims.x - p + 1, grid_dims.y - p + 1, grid_dims.z - p + 1}; }
    const float* row(std::int64_t i) const { return features.data() + std::size_t(i) * feature_dim; }
    Vec3 center_world(std::int64_t i) const {
        return voxel_center(grid_dims, bbox, centers[std::size_t(i)]);
    }
};

// Every dim must be >= p.
PatchSet extract_patches(const FeatureGrid& volume, int p);

// Eq.-style weighted patch distance between two feature rows: appearance
// channels weighted w_a, the geometry channel (1 - w_a).
double patch_distance(const float* q, const float* k, int p, int channels, double w_a);

// Completeness-normalized score matrix C[i][j] = D[i][j] / (alpha + min_l
// D[l][j]), materialized row-major. Small instances only; the exact solver
// streams the same quantity without storing it.
std::vector<double> completeness_scores(const std::vector<double>& distances, std::int64_t m_q,
                                        std::int64_t m_k, double alpha);

}  // namespace voxsyn
