// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "core/grid.h"
#include "xform/mesh.h"

namespace voxsyn {

// Fills enclosed empty regions with kHighDensity: a 6-connected flood from
// every boundary voxel walks through empty voxels (density < threshold);
// empty voxels the flood never reaches are interior. Reached voxels are
// untouched, so the operation is idempotent.
VoxelGrid flood_fill_interior(const VoxelGrid& grid, float high_density = kHighDensity);

// Standard 256-case marching cubes over a scalar plane, vertices placed on
// cell edges by linear interpolation and welded via canonical edge keys.
// All-inside or all-outside volumes yield an empty mesh.
Mesh marching_cubes(const float* density, Int3 dims, const BBox& bbox, float iso);
Mesh marching_cubes(const VoxelGrid& grid, float iso);

// Truncated signed distance per voxel center: unsigned distance to the mesh,
// negative inside (flood-filled density >= threshold), clamped to [-1, 1]
// after division by t. An empty mesh gives +1 everywhere and a warning.
std::vector<float> truncated_sdf(const VoxelGrid& filled_grid, const Mesh& mesh, double t);

// Whole-vector L2 normalization; vectors with norm < 1e-8 collapse to zero.
std::array<float, kShCoeffs> normalize_sh(const float* sh);

struct PcaModel {
    std::array<double, kShCoeffs> mean{};
    std::vector<std::array<double, kShCoeffs>> basis;  // k rows, orthonormal, by descending variance

    int components() const { return int(basis.size()); }
};

// Mean-centered PCA over 27-vectors. Deterministic sign: each basis row's
// largest-magnitude entry is non-negative. Throws with fewer than k samples.
PcaModel pca_fit(const std::vector<std::array<float, kShCoeffs>>& samples, int k = 3);

Vec3 pca_project(const PcaModel& model, const float* sh);

// Voxel size along the axis with the most voxels; the truncation scale t is
// expressed in multiples of this.
double dominant_voxel_size(Int3 dims, const BBox& bbox);

// Full feature transform: flood fill -> marching cubes -> truncated SDF for
// geometry, normalize + PCA for appearance. Unoccupied voxels get zero
// appearance. The PCA model is fitted by the caller (per pyramid scale, on
// that scale's occupied voxels).
TransformedGrid transform_exemplar(const VoxelGrid& grid, double t_multiplier, const PcaModel& pca);

// Normalized SH vectors of occupied voxels: the PCA fitting set.
std::vector<std::array<float, kShCoeffs>> occupied_sh_samples(const VoxelGrid& grid);

}  // namespace voxsyn
