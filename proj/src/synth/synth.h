// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nnf/nnf.h"
#include "pyramid/pyramid.h"

namespace voxsyn {

// Per-scale provenance of one synthesis run.
struct RunLog {
    struct ScaleEntry {
        int scale = 0;
        Int3 synth_dims;
        Int3 exemplar_dims;
        int iterations = 0;
        bool exact = false;
        double seconds = 0.0;
    };
    std::vector<ScaleEntry> scales;
    double total_seconds = 0.0;

    std::string to_text() const;
};

// How the coarsest scale starts.
struct InitSpec {
    enum class Mode { kNoise, kIdentity, kMapping, kFeatures };
    Mode mode = Mode::kNoise;
    MappingField mapping;  // kMapping: an edited proxy at the coarse dims
    FeatureGrid features;  // kFeatures: replacement scale-0 query features
};

// Per-voxel Gaussian shuffle of the identity offsets, per-axis std
// sigma * exemplar half extent. Exposed for the noise-statistics tests.
Vec3 noise_offset(std::uint64_t seed, std::size_t voxel_index, const BBox& exemplar_bbox,
                  double sigma);

// Identity mapping shuffled with Gaussian noise, clamped into the exemplar
// box; sigma = 0 is the exact identity.
MappingField init_coarse(Int3 dims, const BBox& synth_bbox, const BBox& exemplar_bbox, double sigma,
                         std::uint64_t seed);

// Per-scale synthesis dims for a target shape: the finest scale gets
// target_dims, coarser scales scale down with the max-dim schedule, rounded
// half-up per axis.
std::vector<Int3> synthesis_dims(const SynthesisConfig& config, Int3 target_dims);

// The coarse-to-fine loop: scale 0 from the init spec, every later scale
// upsamples the previous mapping, resolves the transformed features through
// it and runs one NNF scale pass against that level's exemplar.
MappingField generate_with_init(const ExemplarPyramid& pyramid, const SynthesisConfig& config,
                                std::uint64_t seed, const InitSpec& init, Int3 target_dims,
                                RunLog* log = nullptr);

// Random generation: noise-shuffled identity init, output at the exemplar's
// own per-scale dims.
MappingField generate(const ExemplarPyramid& pyramid, const SynthesisConfig& config,
                      std::uint64_t seed, RunLog* log = nullptr);

// Applications on the same loop -------------------------------------------------

// Unshuffled identity at a resized lattice; the synthesis box stretches so
// voxel size matches the exemplar per scale.
MappingField retarget(const ExemplarPyramid& pyramid, Int3 target_dims,
                      const SynthesisConfig& config, RunLog* log = nullptr);

// Patch source A, structure B: scale-0 queries are B's transformed features.
MappingField structural_analogy(const ExemplarPyramid& pyramid_a, const TransformedGrid& features_b,
                                const SynthesisConfig& config, RunLog* log = nullptr);

// Resamples scene B into A's matching feature space (A's scale-0 PCA and
// truncation) at the analogy coarse dims.
TransformedGrid analogy_features_from_grid(const ExemplarPyramid& pyramid_a, const VoxelGrid& b,
                                           const SynthesisConfig& config);

// Edited proxy fed as the coarsest initial guess.
MappingField edit_synthesis(const ExemplarPyramid& pyramid, const MappingField& proxy,
                            const SynthesisConfig& config, RunLog* log = nullptr);

// Pure re-read through another exemplar of identical box.
VoxelGrid redecorate(const MappingField& field, const VoxelGrid& other_exemplar);

// Application presets: the same framework with the supplement's schedules.
SynthesisConfig edit_config(SynthesisConfig base);     // 6 scales from max dim 28, exact 3
SynthesisConfig analogy_config(SynthesisConfig base);  // 4 scales from max dim 51, exact 1

}  // namespace voxsyn
