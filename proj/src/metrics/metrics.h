// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "render/render.h"
#include "xform/mesh.h"

namespace voxsyn {

using PointCloud = std::vector<Vec3>;

// Area-weighted uniform surface sampling, deterministic per seed.
PointCloud sample_surface(const Mesh& mesh, int n, std::uint64_t seed);

// Random centers combined with their k nearest neighbors, each patch
// translated so its centroid sits at the origin.
std::vector<PointCloud> extract_patches_pc(const PointCloud& pc, int n_centers, int k,
                                           std::uint64_t seed);

// Symmetric Chamfer: mean squared nearest distance A->B plus B->A. Nearest
// neighbors come from an exact uniform-grid accelerator whose answers match
// brute force exactly.
double chamfer(const PointCloud& a, const PointCloud& b);

// Minimal Matching Distance: per generated patch the minimum Chamfer to any
// exemplar patch, averaged, times 100.
double mmd_quality(const std::vector<PointCloud>& generated, const std::vector<PointCloud>& exemplar);

// Total Mutual Difference: Chamfer summed over unordered scene pairs.
double tmd_diversity(const std::vector<PointCloud>& scenes);

// Per view: mean over pixels of the per-pixel intensity std across the S
// generated renders, normalized by the spatial intensity std of the
// exemplar render at that view; averaged over views. Population stds.
double visual_diversity(const std::vector<std::vector<Image>>& views_by_scene_stacks,
                        const std::vector<Image>& exemplar_views);

}  // namespace voxsyn
