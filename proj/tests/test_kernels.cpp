// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

// Scalar kernels are the reference; every dispatched variant must agree
// within lane-reordering round-off on randomized inputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "kernels/kernels.h"
#include "testutil.h"

using namespace voxsyn;
namespace tu = voxsyn::testutil;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("row_distance: reference values and weight masking") {
    const auto& ref = kern::scalar_kernels();
    // geometry (3,) vs (1,): diff^2 = 4; appearance (0,2) vs (0,0): 4
    const float q[3] = {3.0f, 0.0f, 2.0f};
    const float k[3] = {1.0f, 0.0f, 0.0f};
    CHECK(ref.row_distance(q, k, 1, 2, 0.5, kInf) == doctest::Approx(4.0).epsilon(1e-12));
    // w_a = 1 masks geometry entirely
    CHECK(ref.row_distance(q, k, 1, 2, 1.0, kInf) == doctest::Approx(4.0).epsilon(1e-12));
    const float k2[3] = {1.0f, 0.0f, 2.0f};
    CHECK(ref.row_distance(q, k2, 1, 2, 1.0, kInf) == doctest::Approx(0.0).epsilon(1e-12));
    // identical rows
    CHECK(ref.row_distance(q, q, 1, 2, 0.37, kInf) == 0.0);
}

TEST_CASE("row_distance early-out returns exact sums below the bound") {
    const auto& ref = kern::scalar_kernels();
    const auto a = tu::random_floats(500, 1);
    const auto b = tu::random_floats(500, 2);
    const double full = ref.row_distance(a.data(), b.data(), 125, 375, 0.5, kInf);
    // bound above the value: exact
    CHECK(ref.row_distance(a.data(), b.data(), 125, 375, 0.5, full * 1.001) == full);
    // bound below the value: anything >= bound is allowed
    CHECK(ref.row_distance(a.data(), b.data(), 125, 375, 0.5, full * 0.25) >= full * 0.25);
}

TEST_CASE("dispatched kernels agree with the scalar reference") {
    const auto& ref = kern::scalar_kernels();
    const auto& active = kern::active_kernels();
    INFO("active kernel set: ", active.name);

    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const std::size_t n_geo = 1 + std::size_t(trial % 7) * 23;
        const std::size_t n_app = 3 * n_geo + (trial % 5);
        const auto a = tu::random_floats(n_geo + n_app, 100 + trial, -2.0, 2.0);
        const auto b = tu::random_floats(n_geo + n_app, 200 + trial, -2.0, 2.0);
        const double r = ref.row_distance(a.data(), b.data(), n_geo, n_app, 0.5, kInf);
        const double v = active.row_distance(a.data(), b.data(), n_geo, n_app, 0.5, kInf);
        CHECK(close_rel(r, v, 1e-12));
    }

    // patch views over random volumes, p in {3, 5, 7}
    for (const int p : {3, 5, 7}) {
        const Int3 dims{p + 3, p + 2, p + 1};
        const FeatureGrid qv = tu::random_volume(dims, 4, 900 + p);
        const FeatureGrid kv = tu::random_volume(dims, 4, 1900 + p);
        kern::PatchView q{qv.plane(0) + linear_index(dims, 1, 1, 0), std::size_t(dims.x),
                          std::size_t(dims.x) * dims.y, qv.voxel_count()};
        kern::PatchView k{kv.plane(0) + linear_index(dims, 2, 0, 1), std::size_t(dims.x),
                          std::size_t(dims.x) * dims.y, kv.voxel_count()};
        const double r = ref.patch_distance(q, k, p, 4, 0.5, kInf);
        const double v = active.patch_distance(q, k, p, 4, 0.5, kInf);
        CHECK(close_rel(r, v, 1e-12));
    }

    // min_inplace must agree exactly
    auto d1 = tu::random_floats(1003, 31);
    auto d2 = tu::random_floats(1003, 32);
    std::vector<double> ref_dst(d1.begin(), d1.end()), act_dst(d1.begin(), d1.end());
    std::vector<double> src(d2.begin(), d2.end());
    ref.min_inplace(ref_dst.data(), src.data(), src.size());
    active.min_inplace(act_dst.data(), src.data(), src.size());
    for (std::size_t i = 0; i < src.size(); ++i) CHECK(ref_dst[i] == act_dst[i]);

    // weighted gather over 8 corners x 28 channels
    const auto payload = tu::random_floats(8 * 28, 55);
    const float* corners[8];
    for (int c = 0; c < 8; ++c) corners[c] = payload.data() + c * 28;
    double w[8];
    Rng rng(77);
    double wsum = 0.0;
    for (double& x : w) {
        x = rng.uniform();
        wsum += x;
    }
    for (double& x : w) x /= wsum;
    double ref_out[28], act_out[28];
    ref.weighted_gather(corners, w, 8, 28, ref_out);
    active.weighted_gather(corners, w, 8, 28, act_out);
    for (int c = 0; c < 28; ++c) CHECK(close_rel(ref_out[c], act_out[c], 1e-12));
}

TEST_CASE("patch_distance over a volume matches row_distance over extracted rows") {
    const auto& active = kern::active_kernels();
    const int p = 5;
    const Int3 dims{9, 8, 7};
    const FeatureGrid vol = tu::random_volume(dims, 4, 4242);

    // extract two rows by hand, geometry first then appearance channels
    const auto extract = [&](Int3 off) {
        std::vector<float> row;
        for (int c = 0; c < 4; ++c)
            for (int dz = 0; dz < p; ++dz)
                for (int dy = 0; dy < p; ++dy)
                    for (int dx = 0; dx < p; ++dx)
                        row.push_back(
                            vol.plane(c)[linear_index(dims, off.x + dx, off.y + dy, off.z + dz)]);
        return row;
    };
    const Int3 qo{1, 2, 0}, ko{3, 0, 2};
    const auto qrow = extract(qo), krow = extract(ko);
    const double via_rows =
        active.row_distance(qrow.data(), krow.data(), p * p * p, 3 * p * p * p, 0.5, kInf);

    kern::PatchView q{vol.plane(0) + linear_index(dims, qo), std::size_t(dims.x),
                      std::size_t(dims.x) * dims.y, vol.voxel_count()};
    kern::PatchView k{vol.plane(0) + linear_index(dims, ko), std::size_t(dims.x),
                      std::size_t(dims.x) * dims.y, vol.voxel_count()};
    const double via_volume = active.patch_distance(q, k, p, 4, 0.5, kInf);
    CHECK(close_rel(via_rows, via_volume, 1e-12));
}
