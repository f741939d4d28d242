// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "core/grid.h"

namespace voxsyn {

enum class ExemplarKind { kTerrain, kArches, kBlobs };

ExemplarKind parse_exemplar_kind(const std::string& name);

// Deterministic synthetic exemplars for desk-scale runs: a value-noise
// heightfield with altitude-keyed colors, a ground slab with repeated arch
// structures, or a union of soft colored spheres. Densities lie in [0, 10];
// colors are encoded as SH DC coefficients with a small degree-1 component.
// The noise is a function of world position, so the same seed yields the
// same scene at any resolution.
VoxelGrid procedural_exemplar(ExemplarKind kind, Int3 dims, std::uint64_t seed);

}  // namespace voxsyn
