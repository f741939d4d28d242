// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nnf/patch.h"
#include "pyramid/pyramid.h"

namespace voxsyn {

struct NnfResult {
    enum class Kind { kValueIteration, kFinalCoordinates };

    std::vector<std::int64_t> assignment;  // per query, chosen key patch index
    std::vector<double> distance;          // raw Eq.-2 distance at the assignment
    Kind kind = Kind::kValueIteration;
};

// Throws CapacityError when m_q * m_k exceeds the element budget. Checked
// before any patch features are materialized.
void require_exact_budget(std::int64_t m_q, std::int64_t m_k, std::int64_t budget);

// Full completeness-normalized search: per query the argmin over keys of
// D / (alpha + column-min of D). The column minima and score argmins stream
// over the implicit matrix, so peak memory stays linear even though the work
// is quadratic. Ties resolve to the key whose center is nearest the query's
// own center in world space, then to the smallest index; identical volumes
// therefore self-match exactly.
//
// Throws CapacityError when M_q * M_k exceeds `budget` entries; callers
// should switch to approximate_nnf at that size.
NnfResult exact_nnf(const PatchSet& queries, const PatchSet& keys, double w_a, double alpha,
                    std::int64_t budget = std::int64_t(1) << 31);

// PatchMatch with jump-flood propagation over plain distances (visual
// coherence only). Works directly on the two channel-planar volumes; no patch
// features are materialized, so auxiliary memory is linear in the patch
// counts. Initialized from `prev` when given, else uniformly at random per
// query. Each sweep runs one serialized jump-flood propagation pass
// (offsets +-{8,4,2,1} per axis, alternating scan order) followed by a
// parallel random search with radius halving from the key lattice's max
// dimension. Per-query assigned distances never increase.
NnfResult approximate_nnf(const FeatureGrid& query_volume, const FeatureGrid& key_volume, int p,
                          double w_a, const std::vector<std::int64_t>* prev, std::uint64_t seed,
                          int sweeps = 4, std::vector<std::vector<double>>* sweep_distances = nullptr);

// Mean of the assigned values over every patch covering each voxel.
FeatureGrid blend_values(const NnfResult& result, const FeatureGrid& key_volume, Int3 out_dims,
                         const BBox& out_bbox, int p);

// Coordinate readout: patch-center voxels store the assigned key center's
// world coordinate; border voxels extend their nearest center's patch
// rigidly by the in-patch offset. All coordinates clamp into the key box.
MappingField finalize_coordinates(const NnfResult& result, const FeatureGrid& key_volume,
                                  Int3 out_dims, const BBox& out_bbox, int p);

// One full scale: T-1 match+blend value iterations, then a final match
// whose assignment becomes the coordinate field. Exact scales (scale_index <
// config.exact_scales) run T_e completeness-normalized exact iterations,
// finer scales T_a PatchMatch iterations seeded from `init_assignment`.
MappingField nnf_scale_pass(const FeatureGrid& query_init, const FeatureGrid& key_volume,
                            const SynthesisConfig& config, int scale_index, std::uint64_t seed,
                            const std::vector<std::int64_t>* init_assignment = nullptr);

// Key-patch assignment implied by a mapping field: per query patch center,
// the key patch whose center voxel is nearest the mapped coordinate. Seeds
// PatchMatch at approximate scales.
std::vector<std::int64_t> assignment_from_mapping(const MappingField& field, Int3 key_dims,
                                                  const BBox& key_bbox, Int3 query_dims, int p);

}  // namespace voxsyn
