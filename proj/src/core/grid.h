// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/bbox.h"
#include "core/vec.h"

namespace voxsyn {

// One consistent threshold for occupancy, interior fill, marching-cubes iso
// and SDF sign.
inline constexpr float kDensityThreshold = 1e-2f;
// Value written into flood-filled invisible interior regions.
inline constexpr float kHighDensity = 100.0f;

inline constexpr int kShCoeffs = 27;  // 9 degree-2 coefficients x 3 channels

// Dense voxel radiance grid: per-voxel density and 27 SH coefficients
// (channel-major: R0..R8 G0..G8 B0..B8, stored interleaved per voxel).
// Invariant: density of unoccupied voxels is exactly 0.
struct VoxelGrid {
    Int3 dims;
    BBox bbox;
    std::vector<float> density;        // N
    std::vector<float> sh;             // N * 27, interleaved
    std::vector<std::uint8_t> occupied;  // N

    std::size_t voxel_count() const { return std::size_t(dims.volume()); }
    const float* sh_at(std::size_t idx) const { return sh.data() + idx * kShCoeffs; }
    float* sh_at(std::size_t idx) { return sh.data() + idx * kShCoeffs; }
};

// Allocates a zeroed grid and validates dims/bbox.
VoxelGrid make_voxel_grid(Int3 dims, BBox bbox);

// Re-derives occupancy from the density threshold and zeroes sub-threshold
// densities so the occupancy invariant holds.
void enforce_occupancy(VoxelGrid& grid);

// Matching feature space: channel-planar float volume. Channel 0 is the
// truncated SDF value, channels 1..3 the PCA appearance. Planar layout keeps
// patch rows contiguous per channel.
struct FeatureGrid {
    Int3 dims;
    BBox bbox;
    int channels = 0;
    std::vector<float> data;  // channels * N, planar

    std::size_t voxel_count() const { return std::size_t(dims.volume()); }
    const float* plane(int c) const { return data.data() + std::size_t(c) * voxel_count(); }
    float* plane(int c) { return data.data() + std::size_t(c) * voxel_count(); }
    float at(int c, std::size_t idx) const { return plane(c)[idx]; }
};

FeatureGrid make_feature_grid(Int3 dims, BBox bbox, int channels);

// The transformed exemplar is a 4-channel FeatureGrid.
using TransformedGrid = FeatureGrid;
inline constexpr int kGeometryChannel = 0;
inline constexpr int kAppearanceChannels = 3;
inline constexpr int kTransformedChannels = 1 + kAppearanceChannels;

// The synthesized scene: a continuous exemplar coordinate per synthesis
// voxel. Coordinates are kept in double so an identity field round-trips
// bit-exactly; serialization narrows to f32.
struct MappingField {
    Int3 dims;
    BBox bbox;           // synthesis-space box
    BBox exemplar_bbox;  // coords always lie inside this box
    std::vector<double> coords;  // N * 3, interleaved xyz

    std::size_t voxel_count() const { return std::size_t(dims.volume()); }
    Vec3 coord_at(std::size_t idx) const {
        return {coords[idx * 3], coords[idx * 3 + 1], coords[idx * 3 + 2]};
    }
    void set_coord(std::size_t idx, Vec3 c) {
        coords[idx * 3] = c.x;
        coords[idx * 3 + 1] = c.y;
        coords[idx * 3 + 2] = c.z;
    }
};

MappingField make_mapping_field(Int3 dims, BBox bbox, BBox exemplar_bbox);

// ---- coordinate conventions ------------------------------------------------

inline Vec3 voxel_size(Int3 dims, const BBox& bbox) {
    return {2.0 * bbox.half.x / dims.x, 2.0 * bbox.half.y / dims.y, 2.0 * bbox.half.z / dims.z};
}

// World-space center of a voxel; throws on out-of-range indices.
Vec3 voxel_center(Int3 dims, const BBox& bbox, Int3 index);

// Index of the voxel whose center is nearest to p (clamped to the grid).
Int3 nearest_voxel(Int3 dims, const BBox& bbox, Vec3 p);

// ---- sampling ---------------------------------------------------------------

// Trilinear support: two corner indices and a weight per axis, clamped to the
// outermost centers. Fractions within 1e-9 of 0/1 snap so queries at exact
// voxel centers reproduce stored values bit-for-bit.
struct TrilinearSupport {
    int i0[3], i1[3];
    double w1[3];  // weight of i1 per axis
};

TrilinearSupport trilinear_support(Int3 dims, const BBox& bbox, Vec3 p);

// Non-zero corners of a trilinear stencil, as linear indices plus weights.
struct CornerWeights {
    std::size_t idx[8];
    double w[8];
    int count = 0;
};

CornerWeights corner_weights(Int3 dims, const TrilinearSupport& s);

// Single planar channel.
double trilinear_plane(const float* plane, Int3 dims, const TrilinearSupport& s);

// C interleaved channels into out[0..C).
void trilinear_interleaved(const float* data, int channels, Int3 dims, const TrilinearSupport& s,
                           double* out);

float sample_density(const VoxelGrid& grid, Vec3 p);
void sample_voxel(const VoxelGrid& grid, Vec3 p, double* density, double* sh27);
void sample_features(const FeatureGrid& grid, Vec3 p, double* out);

// ---- mapping-field operations ------------------------------------------------

// Continuous query: field value at the nearest synthesis voxel center plus
// the local offset, clamped into the exemplar box.
Vec3 map_query(const MappingField& field, Vec3 p);

// Each fine voxel center pushed through map_query against the coarse field.
// The synthesis box is unchanged; only the grid refines.
MappingField upsample_mapping(const MappingField& field, Int3 target_dims);

// Identity field: every voxel stores its own center (exactly).
MappingField identity_mapping(Int3 dims, BBox bbox, BBox exemplar_bbox);

// Reads exemplar content through a mapping field. The exemplar may be a
// higher-resolution grid sharing the same box.
VoxelGrid resolve_features(const MappingField& field, const VoxelGrid& exemplar);
FeatureGrid resolve_features(const MappingField& field, const FeatureGrid& exemplar);

// Clamps all stored coordinates into the exemplar box; returns how many
// voxels actually moved.
std::size_t clamp_coords(MappingField& field);

}  // namespace voxsyn
