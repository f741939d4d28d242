// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "core/grid.h"

namespace voxsyn {

struct Camera {
    Vec3 position{0, 0, 2.5};
    Vec3 look_at{0, 0, 0};
    Vec3 up{0, 0, 1};
    double focal = 512.0;  // pixel units
    int width = 512;
    int height = 512;
};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;  // W*H*3 in [0,1], row-major

    float* pixel(int x, int y) { return rgb.data() + (std::size_t(y) * width + x) * 3; }
    const float* pixel(int x, int y) const { return rgb.data() + (std::size_t(y) * width + x) * 3; }
};

// Real SH basis, degree <= 2, evaluated at unit direction d; per channel
// c = sum_k h[c*9+k] * Y_k(d), clamped to [0,1].
void eval_sh(const double* sh27, Vec3 d, double* rgb);

// Emission-absorption ray marching through the grid box with uniform step
// (the trailing step shrinks to end exactly at the exit point), composited
// over a white background. Default step: half the smallest voxel size.
Image render(const VoxelGrid& grid, const Camera& camera, double step = 0.0);

// Mapping-pair rendering: samples go through map_query into the exemplar.
// SH evaluation keeps the viewing direction; view-dependent effects are
// inherited from the exemplar as-is.
Image render(const MappingField& field, const VoxelGrid& exemplar, const Camera& camera,
             double step = 0.0);

// Deterministic quasi-uniform (Fibonacci) poses on the upper hemisphere, all
// looking at the origin; K = 1 degenerates to the zenith.
std::vector<Camera> sample_cameras(int count, double radius, double focal, int width, int height);

double psnr(const Image& a, const Image& b);

}  // namespace voxsyn
