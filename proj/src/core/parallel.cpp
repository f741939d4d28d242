// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "core/parallel.h"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "core/errors.h"

#include <cstdio>
#include <mutex>

namespace voxsyn {

namespace {

std::atomic<int> g_max_threads{0};

int detect_threads() {
    if (const char* env = std::getenv("VOXSYN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

thread_local bool tl_inside_parallel = false;

std::mutex g_warn_mutex;
std::function<void(const std::string&)> g_warning_sink;

}  // namespace

int max_threads() {
    int n = g_max_threads.load(std::memory_order_relaxed);
    if (n <= 0) {
        n = detect_threads();
        g_max_threads.store(n, std::memory_order_relaxed);
    }
    return n;
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

void parallel_chunks(std::size_t n, const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    int workers = max_threads();
    if (std::size_t(workers) > n) workers = int(n);
    // nested calls run inline; the outer level already owns the cores
    if (workers <= 1 || tl_inside_parallel) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(std::size_t(workers));
    const std::size_t chunk = (n + std::size_t(workers) - 1) / std::size_t(workers);
    for (int w = 0; w < workers; ++w) {
        const std::size_t b = std::size_t(w) * chunk;
        const std::size_t e = b + chunk < n ? b + chunk : n;
        if (b >= e) break;
        threads.emplace_back([&fn, w, b, e] {
            tl_inside_parallel = true;
            fn(w, b, e);
            tl_inside_parallel = false;
        });
    }
    for (auto& t : threads) t.join();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_chunks(n, [&fn](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

void emit_warning(const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (g_warning_sink) {
        g_warning_sink(msg);
    } else {
        std::fprintf(stderr, "warning: %s\n", msg.c_str());
    }
}

void set_warning_sink(std::function<void(const std::string&)> sink) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    g_warning_sink = std::move(sink);
}

}  // namespace voxsyn
