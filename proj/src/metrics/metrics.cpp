// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "metrics/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/parallel.h"
#include "core/rng.h"

namespace voxsyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact nearest-point queries over a uniform grid with ring expansion; a
// ring is only skipped once it provably cannot contain a closer point.
class PointGridIndex {
public:
    explicit PointGridIndex(const PointCloud& points) : points_(points) {
        lo_ = hi_ = points.front();
        for (const Vec3& p : points) {
            for (int a = 0; a < 3; ++a) {
                lo_[a] = std::min(lo_[a], p[a]);
                hi_[a] = std::max(hi_[a], p[a]);
            }
        }
        const double target_cells = std::cbrt(double(points.size()));
        for (int a = 0; a < 3; ++a) {
            const double extent = std::max(hi_[a] - lo_[a], 1e-12);
            dims_[a] = std::max(1, int(std::min(128.0, target_cells)));
            cell_[a] = extent / dims_[a];
        }
        min_cell_ = std::min({cell_.x, cell_.y, cell_.z});
        bins_.resize(std::size_t(dims_.volume()));
        for (int i = 0; i < int(points.size()); ++i)
            bins_[linear_index(dims_, cell_of(points[std::size_t(i)]))].push_back(i);
    }

    double nearest_sq(Vec3 q) const {
        const Int3 c = cell_of(q);
        double best = kInf;
        const int k_limit = dims_.max_dim() + 2;
        for (int k = 0; k <= k_limit; ++k) {
            if (k > 0 && best < kInf) {
                const double ring_min = double(k - 1) * min_cell_;
                if (ring_min * ring_min > best) break;
            }
            visit_ring(c, k, [&](std::size_t bin) {
                for (const int i : bins_[bin]) {
                    const double d = norm2(q - points_[std::size_t(i)]);
                    if (d < best) best = d;
                }
            });
        }
        return best;
    }

private:
    Int3 cell_of(Vec3 p) const {
        Int3 c;
        for (int a = 0; a < 3; ++a)
            c[a] = clamp(int((p[a] - lo_[a]) / cell_[a]), 0, dims_[a] - 1);
        return c;
    }

    template <typename Fn>
    void visit_ring(Int3 center, int k, const Fn& fn) const {
        const auto visit = [&](int x, int y, int z) {
            if (x < 0 || y < 0 || z < 0 || x >= dims_.x || y >= dims_.y || z >= dims_.z) return;
            fn(linear_index(dims_, x, y, z));
        };
        if (k == 0) {
            visit(center.x, center.y, center.z);
            return;
        }
        for (int dy = -k; dy <= k; ++dy)
            for (int dz = -k; dz <= k; ++dz) {
                visit(center.x - k, center.y + dy, center.z + dz);
                visit(center.x + k, center.y + dy, center.z + dz);
            }
        for (int dx = -k + 1; dx <= k - 1; ++dx)
            for (int dz = -k; dz <= k; ++dz) {
                visit(center.x + dx, center.y - k, center.z + dz);
                visit(center.x + dx, center.y + k, center.z + dz);
            }
        for (int dx = -k + 1; dx <= k - 1; ++dx)
            for (int dy = -k + 1; dy <= k - 1; ++dy) {
                visit(center.x + dx, center.y + dy, center.z - k);
                visit(center.x + dx, center.y + dy, center.z + k);
            }
    }

    const PointCloud& points_;
    Vec3 lo_, hi_, cell_;
    Int3 dims_;
    double min_cell_ = 0.0;
    std::vector<std::vector<int>> bins_;
};

double directed_mean_sq(const PointCloud& from, const PointGridIndex& to_index) {
    std::vector<double> partial(std::size_t(max_threads()), 0.0);
    parallel_chunks(from.size(), [&](int w, std::size_t b, std::size_t e) {
        double acc = 0.0;
        for (std::size_t i = b; i < e; ++i) acc += to_index.nearest_sq(from[i]);
        partial[std::size_t(w)] = acc;
    });
    const double total = std::accumulate(partial.begin(), partial.end(), 0.0);
    return total / double(from.size());
}

}  // namespace

PointCloud sample_surface(const Mesh& mesh, int n, std::uint64_t seed) {
    if (mesh.empty()) throw UsageError("cannot sample an empty mesh");
    if (n < 1) throw UsageError("sample count must be positive");

    std::vector<double> cumulative(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        total += triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
        cumulative[t] = total;
    }

    PointCloud points{std::size_t(n)};
    parallel_chunks(points.size(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Rng rng(seed, 0x9afe, i);
            const double pick = rng.uniform() * total;
            const std::size_t t = std::size_t(
                std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
            const auto& tri = mesh.triangles[std::min(t, mesh.triangles.size() - 1)];
            const double r1 = std::sqrt(rng.uniform());
            const double r2 = rng.uniform();
            const Vec3 a = mesh.vertices[tri[0]], bb = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
            points[i] = a * (1.0 - r1) + bb * (r1 * (1.0 - r2)) + c * (r1 * r2);
        }
    });
    return points;
}

std::vector<PointCloud> extract_patches_pc(const PointCloud& pc, int n_centers, int k,
                                           std::uint64_t seed) {
    if (int(pc.size()) < k) throw UsageError("point cloud smaller than the patch size k");
    if (n_centers < 1) throw UsageError("need at least one patch center");

    std::vector<PointCloud> patches{std::size_t(n_centers)};
    parallel_chunks(patches.size(), [&](int, std::size_t b, std::size_t e) {
        std::vector<std::pair<double, int>> dist(pc.size());
        for (std::size_t ci = b; ci < e; ++ci) {
            Rng rng(seed, 0xce17, ci);
            const Vec3 center = pc[std::size_t(rng.uniform_int(0, std::int64_t(pc.size()) - 1))];
            for (std::size_t i = 0; i < pc.size(); ++i) dist[i] = {norm2(pc[i] - center), int(i)};
            std::nth_element(dist.begin(), dist.begin() + k - 1, dist.end());
            std::sort(dist.begin(), dist.begin() + k);  // deterministic membership and order

            PointCloud patch(std::size_t(k), Vec3{});
            Vec3 centroid{0, 0, 0};
            for (int i = 0; i < k; ++i) {
                patch[std::size_t(i)] = pc[std::size_t(dist[std::size_t(i)].second)];
                centroid += patch[std::size_t(i)];
            }
            centroid = centroid / double(k);
            for (Vec3& p : patch) p = p - centroid;
            patches[ci] = std::move(patch);
        }
    });
    return patches;
}

double chamfer(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) throw UsageError("chamfer needs non-empty clouds");
    const PointGridIndex index_a(a), index_b(b);
    return directed_mean_sq(a, index_b) + directed_mean_sq(b, index_a);
}

double mmd_quality(const std::vector<PointCloud>& generated,
                   const std::vector<PointCloud>& exemplar) {
    if (generated.empty() || exemplar.empty()) throw UsageError("mmd needs non-empty patch sets");
    double total = 0.0;
    for (const PointCloud& g : generated) {
        double best = kInf;
        for (const PointCloud& e : exemplar) best = std::min(best, chamfer(g, e));
        total += best;
    }
    return 100.0 * total / double(generated.size());
}

double tmd_diversity(const std::vector<PointCloud>& scenes) {
    if (scenes.size() < 2) throw UsageError("tmd needs at least two scenes");
    double total = 0.0;
    for (std::size_t i = 0; i < scenes.size(); ++i)
        for (std::size_t j = i + 1; j < scenes.size(); ++j) total += chamfer(scenes[i], scenes[j]);
    return total;
}

double visual_diversity(const std::vector<std::vector<Image>>& views_by_scene_stacks,
                        const std::vector<Image>& exemplar_views) {
    if (views_by_scene_stacks.size() != exemplar_views.size())
        throw UsageError("view counts differ between generated stacks and exemplar renders");
    if (exemplar_views.empty()) throw UsageError("need at least one view");

    double view_total = 0.0;
    for (std::size_t v = 0; v < exemplar_views.size(); ++v) {
        const auto& stack = views_by_scene_stacks[v];
        if (stack.size() < 2) throw UsageError("visual diversity needs at least two renders per view");
        const Image& ex = exemplar_views[v];
        const std::size_t pixels = std::size_t(ex.width) * std::size_t(ex.height);
        for (const Image& img : stack)
            if (img.width != ex.width || img.height != ex.height)
                throw UsageError("render resolutions differ");

        // mean per-pixel std of intensity across the stack
        double std_sum = 0.0;
        for (std::size_t px = 0; px < pixels; ++px) {
            double mean = 0.0, mean_sq = 0.0;
            for (const Image& img : stack) {
                const float* rgb = img.rgb.data() + px * 3;
                const double intensity = (double(rgb[0]) + double(rgb[1]) + double(rgb[2])) / 3.0;
                mean += intensity;
                mean_sq += intensity * intensity;
            }
            mean /= double(stack.size());
            mean_sq /= double(stack.size());
            std_sum += std::sqrt(std::max(0.0, mean_sq - mean * mean));
        }
        const double mean_pixel_std = std_sum / double(pixels);

        // spatial intensity std of the exemplar render
        double ex_mean = 0.0, ex_mean_sq = 0.0;
        for (std::size_t px = 0; px < pixels; ++px) {
            const float* rgb = ex.rgb.data() + px * 3;
            const double intensity = (double(rgb[0]) + double(rgb[1]) + double(rgb[2])) / 3.0;
            ex_mean += intensity;
            ex_mean_sq += intensity * intensity;
        }
        ex_mean /= double(pixels);
        ex_mean_sq /= double(pixels);
        const double ex_std = std::sqrt(std::max(0.0, ex_mean_sq - ex_mean * ex_mean));
        if (ex_std <= 0.0)
            throw UsageError("exemplar render has zero intensity variance; diversity is undefined");

        view_total += mean_pixel_std / ex_std;
    }
    return view_total / double(exemplar_views.size());
}

}  // namespace voxsyn
