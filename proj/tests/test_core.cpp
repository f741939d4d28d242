// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "core/grid.h"
#include "core/io.h"
#include "core/rng.h"
#include "testutil.h"

using namespace voxsyn;

TEST_CASE("voxel_center matches the centered-box formula") {
    const BBox box{{1, 1, 1}};
    CHECK(voxel_center({2, 2, 2}, box, {0, 0, 0}).x == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(voxel_center({2, 2, 2}, box, {0, 0, 0}).y == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(voxel_center({2, 2, 2}, box, {1, 1, 1}).x == doctest::Approx(0.5).epsilon(1e-12));

    const Vec3 c = voxel_center({4, 4, 4}, box, {3, 0, 0});
    CHECK(c.x == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(c.z == doctest::Approx(-0.75).epsilon(1e-12));

    CHECK_THROWS_AS(voxel_center({2, 2, 2}, box, {2, 0, 0}), UsageError);
    CHECK_THROWS_AS(voxel_center({2, 2, 2}, box, {0, -1, 0}), UsageError);
}

TEST_CASE("trilinear sampling: center identity, constants, midpoint") {
    FeatureGrid vol = make_feature_grid({3, 3, 3}, BBox{{1, 1, 1}}, 1);
    Rng rng(7);
    for (auto& v : vol.data) v = float(rng.uniform());

    // exact center query returns the stored value bit-for-bit
    for (int z = 0; z < 3; ++z)
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 3; ++x) {
                const Vec3 c = voxel_center(vol.dims, vol.bbox, {x, y, z});
                double out;
                sample_features(vol, c, &out);
                CHECK(float(out) == vol.plane(0)[linear_index(vol.dims, x, y, z)]);
            }

    // constant grid samples to the constant anywhere
    FeatureGrid flat = make_feature_grid({4, 5, 6}, BBox{{1, 0.8, 0.6}}, 2);
    for (auto& v : flat.data) v = 3.25f;
    for (int i = 0; i < 20; ++i) {
        Rng prng(100 + i);
        const Vec3 p{(prng.uniform() * 2 - 1), (prng.uniform() * 1.6 - 0.8),
                     (prng.uniform() * 1.2 - 0.6)};
        double out[2];
        sample_features(flat, p, out);
        CHECK(out[0] == doctest::Approx(3.25).epsilon(1e-12));
        CHECK(out[1] == doctest::Approx(3.25).epsilon(1e-12));
    }

    // 1D two-voxel profile (0, 1): midpoint between centers gives 0.5
    FeatureGrid line = make_feature_grid({2, 1, 1}, BBox{{1, 0.5, 0.5}}, 1);
    line.plane(0)[0] = 0.0f;
    line.plane(0)[1] = 1.0f;
    double mid;
    sample_features(line, {0.0, 0.0, 0.0}, &mid);
    CHECK(mid == doctest::Approx(0.5).epsilon(1e-12));

    // clamp-to-edge beyond the outermost centers
    double edge;
    sample_features(line, {0.99, 0.0, 0.0}, &edge);
    CHECK(edge == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("map_query: zero offset at centers, identity field, offset rule") {
    const Int3 dims{4, 4, 4};
    const BBox box{{1, 1, 1}};
    MappingField field = identity_mapping(dims, box, box);

    // identity + local offset reconstructs the query exactly
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Vec3 p{rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1};
        const Vec3 q = map_query(field, p);
        CHECK(q.x == p.x);
        CHECK(q.y == p.y);
        CHECK(q.z == p.z);
    }

    // field storing c at the nearest center: query center + delta -> c + delta
    const Vec3 stored{0.3, -0.2, 0.1};
    MappingField constant = make_mapping_field(dims, box, box);
    for (std::size_t i = 0; i < constant.voxel_count(); ++i) constant.set_coord(i, stored);
    const Vec3 center = voxel_center(dims, box, {1, 2, 3});
    const Vec3 q = map_query(constant, center + Vec3{0.1, 0, 0});
    CHECK(q.x == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(q.y == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(q.z == doctest::Approx(0.1).epsilon(1e-12));

    // exact center -> stored coordinate, delta = 0
    const Vec3 q0 = map_query(constant, center);
    CHECK(q0.x == stored.x);
    CHECK(q0.y == stored.y);
    CHECK(q0.z == stored.z);
}

TEST_CASE("upsample_mapping: identity fixed point, translation commutes, dims rule") {
    const BBox box{{1, 1, 1}};
    MappingField coarse = identity_mapping({3, 3, 3}, box, box);
    MappingField fine = upsample_mapping(coarse, {4, 4, 4});
    CHECK(fine.dims == Int3{4, 4, 4});
    MappingField fine_id = identity_mapping({4, 4, 4}, box, box);
    for (std::size_t i = 0; i < fine.voxel_count(); ++i) {
        CHECK(fine.coord_at(i).x == doctest::Approx(fine_id.coord_at(i).x).epsilon(1e-12));
        CHECK(fine.coord_at(i).y == doctest::Approx(fine_id.coord_at(i).y).epsilon(1e-12));
        CHECK(fine.coord_at(i).z == doctest::Approx(fine_id.coord_at(i).z).epsilon(1e-12));
    }

    // uniform translation commutes with upsampling (away from the clamp)
    const Vec3 shift{0.05, -0.03, 0.04};
    MappingField shifted = coarse;
    for (std::size_t i = 0; i < shifted.voxel_count(); ++i)
        shifted.set_coord(i, shifted.coord_at(i) + shift);
    clamp_coords(shifted);
    MappingField shifted_fine = upsample_mapping(shifted, {4, 4, 4});
    for (std::size_t i = 0; i < shifted_fine.voxel_count(); ++i) {
        const Vec3 expect = box.clamp_point(fine.coord_at(i) + shift);
        CHECK(shifted_fine.coord_at(i).x == doctest::Approx(expect.x).epsilon(1e-9));
        CHECK(shifted_fine.coord_at(i).y == doctest::Approx(expect.y).epsilon(1e-9));
        CHECK(shifted_fine.coord_at(i).z == doctest::Approx(expect.z).epsilon(1e-9));
    }

    CHECK_THROWS_AS(upsample_mapping(fine, {3, 4, 4}), UsageError);
}

TEST_CASE("resolve_features reproduces the exemplar through an identity field") {
    VoxelGrid ex = make_voxel_grid({5, 4, 3}, normalized_bbox({5, 4, 3}));
    Rng rng(9);
    for (std::size_t i = 0; i < ex.voxel_count(); ++i) {
        ex.density[i] = float(rng.uniform() * 5.0);
        for (int c = 0; c < kShCoeffs; ++c) ex.sh_at(i)[c] = float(rng.uniform() - 0.5);
    }
    enforce_occupancy(ex);

    const MappingField id = identity_mapping(ex.dims, ex.bbox, ex.bbox);
    const VoxelGrid out = resolve_features(id, ex);
    for (std::size_t i = 0; i < ex.voxel_count(); ++i) {
        CHECK(out.density[i] == ex.density[i]);
        for (int c = 0; c < kShCoeffs; ++c) CHECK(out.sh_at(i)[c] == ex.sh_at(i)[c]);
    }

    // constant map: every voxel reads one fixed exemplar center
    MappingField constant = make_mapping_field(ex.dims, ex.bbox, ex.bbox);
    const Vec3 target = voxel_center(ex.dims, ex.bbox, {2, 1, 1});
    for (std::size_t i = 0; i < constant.voxel_count(); ++i) constant.set_coord(i, target);
    const VoxelGrid flat = resolve_features(constant, ex);
    const std::size_t t = linear_index(ex.dims, 2, 1, 1);
    for (std::size_t i = 0; i < flat.voxel_count(); ++i)
        CHECK(flat.density[i] == doctest::Approx(double(ex.density[t])).epsilon(1e-12));

    // identity readout against a finer exemplar equals direct trilinear calls
    VoxelGrid fine = make_voxel_grid({10, 8, 6}, ex.bbox);
    for (std::size_t i = 0; i < fine.voxel_count(); ++i) fine.density[i] = float(rng.uniform() * 5.0);
    enforce_occupancy(fine);
    const VoxelGrid coarse_read = resolve_features(id, fine);
    for (std::size_t i = 0; i < coarse_read.voxel_count(); ++i) {
        const Int3 idx = delinearize(ex.dims, i);
        const float direct = sample_density(fine, voxel_center(ex.dims, ex.bbox, idx));
        const float expected = direct >= kDensityThreshold ? direct : 0.0f;
        CHECK(coarse_read.density[i] == expected);
    }
}

TEST_CASE("mapping coordinates stay inside the exemplar box") {
    const BBox synth{{1.5, 1, 1}};
    const BBox ex{{1, 1, 1}};
    MappingField f = identity_mapping({8, 6, 6}, synth, ex);
    for (std::size_t i = 0; i < f.voxel_count(); ++i) CHECK(ex.contains(f.coord_at(i)));
    MappingField up = upsample_mapping(f, {11, 8, 8});
    for (std::size_t i = 0; i < up.voxel_count(); ++i) CHECK(ex.contains(up.coord_at(i)));
}

TEST_CASE("VXG and VXM files round-trip") {
    const std::string dir = "/tmp/voxsyn_io_test";
    std::filesystem::create_directories(dir);

    VoxelGrid g = make_voxel_grid({4, 3, 2}, normalized_bbox({4, 3, 2}));
    Rng rng(21);
    for (std::size_t i = 0; i < g.voxel_count(); ++i) {
        g.density[i] = float(rng.uniform() * 4.0);
        for (int c = 0; c < kShCoeffs; ++c) g.sh_at(i)[c] = float(rng.uniform() - 0.5);
    }
    enforce_occupancy(g);
    write_vxg(dir + "/g.vxg", g);
    const VoxelGrid g2 = read_vxg(dir + "/g.vxg");
    CHECK(g2.dims == g.dims);
    CHECK(g2.bbox.half.x == doctest::Approx(g.bbox.half.x).epsilon(1e-6));
    for (std::size_t i = 0; i < g.voxel_count(); ++i) {
        CHECK(g2.density[i] == g.density[i]);
        CHECK(g2.occupied[i] == g.occupied[i]);
    }

    MappingField f = identity_mapping({3, 3, 3}, g.bbox, g.bbox);
    write_vxm(dir + "/f.vxm", f);
    const MappingField f2 = read_vxm(dir + "/f.vxm");
    CHECK(f2.dims == f.dims);
    for (std::size_t i = 0; i < f.voxel_count(); ++i)
        CHECK(f2.coord_at(i).x == doctest::Approx(f.coord_at(i).x).epsilon(1e-6));

    CHECK_THROWS_AS(read_vxg(dir + "/missing.vxg"), IoError);
    CHECK_THROWS_AS(read_vxg(dir + "/f.vxm"), IoError);
}

TEST_CASE("rng determinism and normal statistics") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng n(7);
    double mean = 0.0, var = 0.0;
    const int kSamples = 20000;
    std::vector<double> xs(kSamples);
    for (auto& x : xs) x = n.normal();
    for (double x : xs) mean += x / kSamples;
    for (double x : xs) var += (x - mean) * (x - mean) / kSamples;
    CHECK(std::abs(mean) < 0.03);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("VXM load clamps out-of-box coordinates with a warning") {
    const std::string dir = "/tmp/voxsyn_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/oob.vxm";

    // hand-crafted file: 1x1x1 field claiming an exemplar half extent of 0.5
    // but storing the coordinate (2, 0, 0)
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        const auto u32 = [&](std::uint32_t v) { std::fwrite(&v, 4, 1, f); };
        const auto f32 = [&](float v) { std::fwrite(&v, 4, 1, f); };
        std::fwrite("VXM1", 1, 4, f);
        u32(1);
        u32(1);
        u32(1);
        f32(1.0f);
        f32(1.0f);
        f32(1.0f);  // synthesis box
        f32(0.5f);
        f32(0.5f);
        f32(0.5f);  // exemplar box
        f32(2.0f);
        f32(0.0f);
        f32(0.0f);  // stored coordinate, outside the exemplar box
        std::fclose(f);
    }

    int warnings = 0;
    set_warning_sink([&](const std::string&) { ++warnings; });
    const MappingField field = read_vxm(path);
    set_warning_sink(nullptr);
    CHECK(warnings == 1);
    CHECK(field.coord_at(0).x == 0.5);
    CHECK(field.exemplar_bbox.contains(field.coord_at(0)));
}
