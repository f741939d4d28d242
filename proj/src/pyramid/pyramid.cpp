// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "pyramid/pyramid.h"

#include <cmath>
#include <string>

#include "core/parallel.h"

namespace voxsyn {

void SynthesisConfig::validate() const {
    if (!(r > 1.0)) throw UsageError("scale factor r must exceed 1");
    if (p < 3 || p % 2 == 0) throw UsageError("patch edge p must be odd and >= 3");
    if (w_a < 0.0 || w_a > 1.0) throw UsageError("w_a must lie in [0, 1]");
    if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
    if (sigma < 0.0) throw UsageError("sigma must be non-negative");
    if (!(t_multiplier > 0.0)) throw UsageError("t multiplier must be positive");
    if (T_e < 1 || T_a < 1) throw UsageError("iteration counts must be >= 1");
    if (exact_scales < 0) throw UsageError("exact scale count must be >= 0");
    if (pm_sweeps < 1) throw UsageError("PatchMatch sweep count must be >= 1");
    if (max_dim_schedule.empty()) throw UsageError("resolution schedule is empty");
    for (std::size_t i = 1; i < max_dim_schedule.size(); ++i)
        if (max_dim_schedule[i] <= max_dim_schedule[i - 1])
            throw UsageError("resolution schedule must be strictly increasing");
    if (max_dim_schedule.front() < 2) throw UsageError("coarsest resolution must be >= 2");
}

Int3 dims_for_max_dim(int max_dim, Int3 aspect) {
    const int m = aspect.max_dim();
    Int3 out;
    for (int a = 0; a < 3; ++a) {
        const double scaled = double(max_dim) * double(aspect[a]) / double(m);
        out[a] = std::max(1, int(std::floor(scaled + 0.5)));  // round half-up
    }
    return out;
}

std::vector<Int3> scale_schedule(const SynthesisConfig& config, Int3 exemplar_dims) {
    config.validate();
    std::vector<Int3> dims;
    dims.reserve(config.max_dim_schedule.size());
    for (const int m : config.max_dim_schedule) dims.push_back(dims_for_max_dim(m, exemplar_dims));
    return dims;
}

std::vector<int> schedule_from_r(int coarsest, int finest, double r) {
    if (coarsest < 2 || finest <= coarsest) throw UsageError("need 2 <= coarsest < finest");
    if (!(r > 1.0)) throw UsageError("scale factor r must exceed 1");
    std::vector<int> schedule;
    double value = double(coarsest);
    const double min_last_step = std::sqrt(r);  // avoid a degenerate final hop
    while (true) {
        const int rounded = int(std::floor(value + 0.5));
        if (double(rounded) * min_last_step >= double(finest)) break;
        if (schedule.empty() || rounded > schedule.back()) schedule.push_back(rounded);
        value *= r;
    }
    schedule.push_back(finest);
    return schedule;
}

VoxelGrid resample_grid(const VoxelGrid& grid, Int3 target_dims) {
    if (target_dims == grid.dims) {
        VoxelGrid copy = grid;
        return copy;
    }
    VoxelGrid out = make_voxel_grid(target_dims, grid.bbox);
    parallel_chunks(out.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        double sh27[kShCoeffs];
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(target_dims, i);
            const Vec3 x = voxel_center(target_dims, out.bbox, idx);
            double d;
            sample_voxel(grid, x, &d, sh27);
            out.density[i] = float(d);
            float* dst = out.sh_at(i);
            for (int c = 0; c < kShCoeffs; ++c) dst[c] = float(sh27[c]);
        }
    });
    enforce_occupancy(out);
    return out;
}

ExemplarPyramid build_pyramid_from_grids(std::vector<VoxelGrid> level_grids,
                                         std::optional<VoxelGrid> high_res,
                                         const SynthesisConfig& config) {
    config.validate();
    if (level_grids.empty()) throw UsageError("pyramid needs at least one level");
    for (std::size_t i = 1; i < level_grids.size(); ++i) {
        if (level_grids[i].dims.max_dim() <= level_grids[i - 1].dims.max_dim())
            throw UsageError("pyramid level resolutions must strictly increase");
        if (!(level_grids[i].bbox == level_grids[0].bbox))
            throw UsageError("pyramid levels must share one bounding box");
    }

    ExemplarPyramid pyr;
    pyr.high_res = high_res ? std::move(*high_res) : level_grids.back();
    if (!(pyr.high_res.bbox == level_grids[0].bbox))
        throw UsageError("high-res exemplar must share the pyramid bounding box");

    pyr.levels.resize(level_grids.size());
    for (std::size_t i = 0; i < level_grids.size(); ++i) {
        PyramidLevel& level = pyr.levels[i];
        level.grid = std::move(level_grids[i]);
        const auto samples = occupied_sh_samples(level.grid);
        level.pca = pca_fit(samples, kAppearanceChannels);
        level.transformed = transform_exemplar(level.grid, config.t_multiplier, level.pca);
    }
    return pyr;
}

ExemplarPyramid build_pyramid(const VoxelGrid& fine_exemplar, const SynthesisConfig& config) {
    config.validate();
    const std::vector<Int3> dims = scale_schedule(config, fine_exemplar.dims);
    if (fine_exemplar.dims.max_dim() < config.max_dim_schedule.back())
        throw UsageError("exemplar max dimension " + std::to_string(fine_exemplar.dims.max_dim()) +
                         " is below the finest scheduled resolution " +
                         std::to_string(config.max_dim_schedule.back()));

    std::vector<VoxelGrid> levels;
    levels.reserve(dims.size());
    for (const Int3& d : dims) levels.push_back(resample_grid(fine_exemplar, d));
    return build_pyramid_from_grids(std::move(levels), fine_exemplar, config);
}

}  // namespace voxsyn
