// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace voxsyn::kern {

// A p^3 patch inside a channel-planar float volume. `base` points at the
// channel-0 voxel of the patch's min corner; rows along x are contiguous.
struct PatchView {
    const float* base;
    std::size_t sy;  // element stride between y rows
    std::size_t sz;  // element stride between z slices
    std::size_t sc;  // element stride between channel planes
};

// Hot arithmetic loops, dispatched at runtime. Scalar implementations are the
// reference; vector variants must agree within a few ulps (equivalence-tested)
// but are not required to be bit-identical since lane-parallel summation
// reorders the additions. All accumulation is in double: feature rows are
// p^3-element sums whose round-off would otherwise grow with patch size.
//
// Distance functions take an inclusive upper `bound` and may return early
// with any value >= bound once the running sum can no longer stay below it;
// results below bound are always the exact full sum.
struct Kernels {
    const char* name;

    // Weighted squared L2 over one contiguous feature row: the geometry block
    // [0, n_geo) weighted (1 - w_app), the appearance block [n_geo,
    // n_geo + n_app) weighted w_app.
    double (*row_distance)(const float* q, const float* k, std::size_t n_geo, std::size_t n_app,
                           double w_app, double bound);

    // Same metric evaluated in place over two p^3 patches of channel-planar
    // volumes; channel 0 is geometry, channels 1..channels-1 appearance.
    double (*patch_distance)(const PatchView& q, const PatchView& k, int p, int channels,
                             double w_app, double bound);

    // dst[i] = min(dst[i], src[i])
    void (*min_inplace)(double* dst, const double* src, std::size_t n);

    // out[c] = sum_k w[k] * corners[k][c]; corner payloads are `channels`
    // contiguous floats (interleaved voxel data).
    void (*weighted_gather)(const float* const* corners, const double* w, int count, int channels,
                            double* out);
};

const Kernels& scalar_kernels();

// Best variant for this CPU. Honors VOXSYN_FORCE_SCALAR=1 and force_scalar().
const Kernels& active_kernels();

// Test hook; true pins the scalar reference path.
void force_scalar(bool on);

#ifdef VOXSYN_WITH_AVX2
const Kernels& avx2_kernels();
#endif

// TODO: NEON variants for aarch64; dispatch currently falls back to scalar
// on non-x86 hosts.

}  // namespace voxsyn::kern
