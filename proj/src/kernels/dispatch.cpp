// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>

#include "kernels/kernels.h"

namespace voxsyn::kern {

namespace {

std::atomic<bool> g_force_scalar{false};

bool env_forces_scalar() {
    const char* env = std::getenv("VOXSYN_FORCE_SCALAR");
    return env && env[0] == '1';
}

const Kernels* pick() {
#ifdef VOXSYN_WITH_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_kernels();
#endif
    return &scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
    if (g_force_scalar.load(std::memory_order_relaxed) || env_forces_scalar())
        return scalar_kernels();
    static const Kernels* best = pick();
    return *best;
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

}  // namespace voxsyn::kern
