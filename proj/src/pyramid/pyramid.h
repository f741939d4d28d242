// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "core/grid.h"
#include "xform/xform.h"

namespace voxsyn {

// All pyramid/NNF hyperparameters with their defaults.
struct SynthesisConfig {
    double r = 4.0 / 3.0;       // scale factor between consecutive levels
    int p = 5;                  // patch edge
    double w_a = 0.5;           // appearance weight in the patch distance
    double alpha = 0.01;        // completeness trade-off
    double sigma = 0.5;         // coarse-init noise, in half-extent units
    double t_multiplier = 3.0;  // SDF truncation, in voxel sizes
    int T_e = 10;               // iterations per exact scale
    int T_a = 2;                // iterations per approximate scale
    int exact_scales = 5;       // scales 0..exact_scales-1 use exact NNF
    int pm_sweeps = 4;          // PatchMatch sweeps per approximate match
    std::vector<int> max_dim_schedule = {16, 21, 28, 38, 51, 68, 91, 121};
    std::uint64_t seed = 0;
    std::int64_t exact_budget = std::int64_t(1) << 31;  // max M_q*M_k entries for exact NNF

    int scale_count() const { return int(max_dim_schedule.size()); }
    int n_levels() const { return scale_count() - 1; }  // the paper-style N

    void validate() const;
};

// Per-level axis dims for the given max-dim entry: the largest axis gets
// max_dim, the others follow the aspect ratio, rounded half-up, at least 1.
Int3 dims_for_max_dim(int max_dim, Int3 aspect);

// The full per-level dims list for an exemplar shape; throws if the schedule
// is not strictly increasing.
std::vector<Int3> scale_schedule(const SynthesisConfig& config, Int3 exemplar_dims);

// Ablation schedules: grow from `coarsest` by factor r (rounded half-up)
// until `finest`, which always terminates the list. The default schedule is
// pinned verbatim instead of generated, since no simple rounding of powers
// of r reproduces it at every level.
std::vector<int> schedule_from_r(int coarsest, int finest, double r);

struct PyramidLevel {
    VoxelGrid grid;
    TransformedGrid transformed;
    PcaModel pca;
};

// Coarse-to-fine exemplar stack sharing one bounding box, plus the
// high-resolution grid used for final readout.
struct ExemplarPyramid {
    std::vector<PyramidLevel> levels;
    VoxelGrid high_res;

    int count() const { return int(levels.size()); }
    const BBox& bbox() const { return levels.front().grid.bbox; }
};

// Trilinear resample of density and raw SH channels to the target dims;
// occupancy re-derived from the density threshold.
VoxelGrid resample_grid(const VoxelGrid& grid, Int3 target_dims);

// Builds the pyramid by downsampling the fine exemplar to the schedule dims
// and transforming each level (per-level PCA fitted on that level's occupied
// voxels). The fine exemplar itself is retained as high_res.
ExemplarPyramid build_pyramid(const VoxelGrid& fine_exemplar, const SynthesisConfig& config);

// Same transform pass over externally supplied level grids (one per scale,
// coarse to fine), for pyramids trained elsewhere.
ExemplarPyramid build_pyramid_from_grids(std::vector<VoxelGrid> level_grids,
                                         std::optional<VoxelGrid> high_res,
                                         const SynthesisConfig& config);

}  // namespace voxsyn
