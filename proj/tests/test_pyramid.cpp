// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pyramid/procedural.h"
#include "pyramid/pyramid.h"

using namespace voxsyn;

TEST_CASE("scale_schedule: published max-dim sequence and aspect handling") {
    SynthesisConfig config;
    const std::vector<int> expected = {16, 21, 28, 38, 51, 68, 91, 121};
    CHECK(config.max_dim_schedule == expected);
    CHECK(config.scale_count() == 8);
    CHECK(config.n_levels() == 7);

    // paper-shaped exemplar: finest level keeps its own dims
    const auto dims = scale_schedule(config, {121, 121, 47});
    CHECK(dims.back() == Int3{121, 121, 47});
    CHECK(dims.front().x == 16);
    CHECK(dims.front().y == 16);
    CHECK(dims.front().z == 6);  // round_half_up(16 * 47/121)

    // cubic exemplar: all axes equal at every level
    const auto cubic = scale_schedule(config, {121, 121, 121});
    for (std::size_t k = 0; k < cubic.size(); ++k) {
        CHECK(cubic[k].x == expected[k]);
        CHECK(cubic[k].y == expected[k]);
        CHECK(cubic[k].z == expected[k]);
    }

    SynthesisConfig bad = config;
    bad.max_dim_schedule = {16, 21, 21, 38};
    CHECK_THROWS_AS(scale_schedule(bad, {64, 64, 64}), UsageError);
}

TEST_CASE("procedural exemplars: determinism, density range, terrain shape") {
    const VoxelGrid a = procedural_exemplar(ExemplarKind::kTerrain, {48, 48, 24}, 7);
    const VoxelGrid b = procedural_exemplar(ExemplarKind::kTerrain, {48, 48, 24}, 7);
    CHECK(a.density == b.density);
    CHECK(a.sh == b.sh);
    const VoxelGrid c = procedural_exemplar(ExemplarKind::kTerrain, {48, 48, 24}, 8);
    CHECK(a.density != c.density);

    for (const auto kind : {ExemplarKind::kTerrain, ExemplarKind::kArches, ExemplarKind::kBlobs}) {
        const VoxelGrid g = procedural_exemplar(kind, {32, 32, 32}, 3);
        for (std::size_t i = 0; i < g.voxel_count(); ++i) {
            CHECK(g.density[i] >= 0.0f);
            CHECK(g.density[i] <= 10.0f);
            CHECK((g.occupied[i] == 1) == (g.density[i] >= kDensityThreshold));
            if (!g.occupied[i]) CHECK(g.density[i] == 0.0f);
        }
    }

    // heightfield stays below the ceiling: the top layer is empty
    const Int3 tdims = a.dims;
    for (int y = 0; y < tdims.y; ++y)
        for (int x = 0; x < tdims.x; ++x)
            CHECK(a.density[linear_index(tdims, x, y, tdims.z - 1)] == 0.0f);

    // frozen regression band for the generator
    const VoxelGrid t64 = procedural_exemplar(ExemplarKind::kTerrain, {64, 64, 64}, 7);
    std::size_t occ = 0;
    for (const auto o : t64.occupied) occ += o;
    const double fraction = double(occ) / double(t64.voxel_count());
    CHECK(fraction >= 0.1);
    CHECK(fraction <= 0.6);

    CHECK_THROWS_AS(procedural_exemplar(ExemplarKind::kTerrain, {8, 32, 32}, 1), UsageError);
    CHECK_THROWS_AS(parse_exemplar_kind("unknown"), UsageError);
}

TEST_CASE("resample round trip on a band-limited terrain stays within 10% relative L2") {
    const VoxelGrid fine = procedural_exemplar(ExemplarKind::kTerrain, {64, 64, 64}, 9);
    const VoxelGrid coarse = resample_grid(fine, {38, 38, 38});
    const VoxelGrid back = resample_grid(coarse, {64, 64, 64});
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fine.voxel_count(); ++i) {
        const double d = double(back.density[i]) - double(fine.density[i]);
        num += d * d;
        den += double(fine.density[i]) * double(fine.density[i]);
    }
    CHECK(std::sqrt(num / den) <= 0.1);
}

TEST_CASE("build_pyramid: level structure, shared box, shrinking voxels, high-res kept") {
    SynthesisConfig config;
    config.max_dim_schedule = {16, 21, 28, 38};
    config.exact_scales = 3;

    const VoxelGrid exemplar = procedural_exemplar(ExemplarKind::kTerrain, {38, 38, 19}, 5);
    const ExemplarPyramid pyr = build_pyramid(exemplar, config);
    CHECK(pyr.count() == 4);
    CHECK(pyr.high_res.dims == exemplar.dims);

    double prev_voxel = 1e9;
    int prev_max = 0;
    for (const auto& level : pyr.levels) {
        CHECK(level.grid.bbox == exemplar.bbox);
        CHECK(level.transformed.dims == level.grid.dims);
        CHECK(level.grid.dims.max_dim() > prev_max);
        prev_max = level.grid.dims.max_dim();
        const double v = dominant_voxel_size(level.grid.dims, level.grid.bbox);
        CHECK(v < prev_voxel);
        prev_voxel = v;
        for (std::size_t i = 0; i < level.transformed.voxel_count(); ++i) {
            CHECK(level.transformed.plane(0)[i] >= -1.0f);
            CHECK(level.transformed.plane(0)[i] <= 1.0f);
        }
    }

    // deterministic given (exemplar, config)
    const ExemplarPyramid again = build_pyramid(exemplar, config);
    for (int k = 0; k < pyr.count(); ++k)
        CHECK(again.levels[std::size_t(k)].transformed.data == pyr.levels[std::size_t(k)].transformed.data);

    // constant exemplar: every level constant
    VoxelGrid flat = make_voxel_grid({38, 38, 38}, normalized_bbox({38, 38, 38}));
    for (std::size_t i = 0; i < flat.voxel_count(); ++i) {
        flat.density[i] = 5.0f;
        flat.sh_at(i)[0] = 1.0f;
    }
    enforce_occupancy(flat);
    int warnings = 0;
    set_warning_sink([&](const std::string&) { ++warnings; });
    const ExemplarPyramid flat_pyr = build_pyramid(flat, config);
    set_warning_sink(nullptr);
    CHECK(warnings == 4);  // all-inside levels have no surface
    for (const auto& level : flat_pyr.levels)
        for (const float d : level.grid.density) CHECK(d == 5.0f);

    // undersized exemplar rejected
    CHECK_THROWS_AS(build_pyramid(procedural_exemplar(ExemplarKind::kTerrain, {21, 21, 21}, 1), config),
                    UsageError);
}

TEST_CASE("build_pyramid_from_grids validates structure") {
    SynthesisConfig config;
    config.max_dim_schedule = {16, 21};

    const VoxelGrid a = procedural_exemplar(ExemplarKind::kBlobs, {16, 16, 16}, 2);
    const VoxelGrid b = procedural_exemplar(ExemplarKind::kBlobs, {21, 21, 21}, 2);
    const ExemplarPyramid pyr = build_pyramid_from_grids({a, b}, std::nullopt, config);
    CHECK(pyr.count() == 2);
    CHECK(pyr.high_res.dims == b.dims);

    CHECK_THROWS_AS(build_pyramid_from_grids({b, a}, std::nullopt, config), UsageError);
    VoxelGrid odd_box = b;
    odd_box.bbox = BBox{{2, 2, 2}};
    CHECK_THROWS_AS(build_pyramid_from_grids({a, odd_box}, std::nullopt, config), UsageError);
}

TEST_CASE("schedule_from_r grows by the scale factor and ends at the finest dim") {
    CHECK(schedule_from_r(16, 121, 4.0 / 3.0) ==
          std::vector<int>{16, 21, 28, 38, 51, 67, 90, 121});
    CHECK(schedule_from_r(16, 121, 2.0) == std::vector<int>{16, 32, 64, 121});
    CHECK(schedule_from_r(16, 121, 1.5) == std::vector<int>{16, 24, 36, 54, 81, 121});
    CHECK_THROWS_AS(schedule_from_r(16, 16, 1.5), UsageError);
    CHECK_THROWS_AS(schedule_from_r(16, 121, 1.0), UsageError);
}
