// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "core/grid.h"

namespace voxsyn {

// VXG binary grid: magic "VXG1", u32 Dx Dy Dz, u32 channel count C,
// 3 x f32 half extents, then Dx*Dy*Dz*C f32 values, x-fastest, C values
// interleaved per voxel. Little-endian throughout.
//
// A VoxelGrid serializes with C = 28 (density followed by 27 SH coefficients).
void write_vxg(const std::string& path, const VoxelGrid& grid);
VoxelGrid read_vxg(const std::string& path);

// Raw accessors for non-28-channel grids (transformed features, debug dumps).
void write_vxg_raw(const std::string& path, Int3 dims, const BBox& bbox, int channels,
                   const std::vector<float>& interleaved);

// VXM mapping field: magic "VXM1", u32 Dx Dy Dz, 3 x f32 synthesis half
// extents, 3 x f32 exemplar half extents, then 3 f32 per voxel.
void write_vxm(const std::string& path, const MappingField& field);
MappingField read_vxm(const std::string& path);

// Binary PPM (P6), 8-bit, from [0,1] RGB floats.
void write_ppm(const std::string& path, int width, int height, const std::vector<float>& rgb);

}  // namespace voxsyn
