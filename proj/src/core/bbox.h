// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "core/errors.h"
#include "core/vec.h"

namespace voxsyn {

// Axis-aligned box centered at the origin.
struct BBox {
    Vec3 half{1.0, 1.0, 1.0};

    bool contains(Vec3 p) const {
        return std::abs(p.x) <= half.x && std::abs(p.y) <= half.y && std::abs(p.z) <= half.z;
    }
    Vec3 clamp_point(Vec3 p) const {
        return {clamp(p.x, -half.x, half.x), clamp(p.y, -half.y, half.y), clamp(p.z, -half.z, half.z)};
    }
    friend bool operator==(const BBox& a, const BBox& b) {
        return a.half.x == b.half.x && a.half.y == b.half.y && a.half.z == b.half.z;
    }
};

inline void validate_bbox(const BBox& b) {
    if (!(b.half.x > 0.0 && b.half.y > 0.0 && b.half.z > 0.0))
        throw UsageError("bbox half extents must be positive");
}

// Box whose aspect follows the grid dims, normalized so the largest half
// extent is exactly 1. Keeps noise scales and offsets resolution-independent.
inline BBox normalized_bbox(Int3 dims) {
    if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) throw UsageError("grid dims must be positive");
    const double m = double(dims.max_dim());
    return BBox{{double(dims.x) / m, double(dims.y) / m, double(dims.z) / m}};
}

}  // namespace voxsyn
