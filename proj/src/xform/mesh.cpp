// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "xform/mesh.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/errors.h"

namespace voxsyn {

double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * norm(cross(b - a, c - a)); }

double mesh_area(const Mesh& mesh) {
    double area = 0.0;
    for (const auto& t : mesh.triangles)
        area += triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    return area;
}

Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_dist_sq(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
    return norm2(p - closest_point_on_triangle(p, a, b, c));
}

void write_obj(const std::string& path, const Mesh& mesh) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open '" + path + "'");
    for (const Vec3& v : mesh.vertices) std::fprintf(f, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    for (const auto& t : mesh.triangles)
        std::fprintf(f, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    std::fclose(f);
}

MeshDistanceIndex::MeshDistanceIndex(const Mesh& mesh, Int3 grid_dims, const BBox& bbox)
    : mesh_(mesh), dims_(grid_dims), bbox_(bbox) {
    cell_size_ = voxel_size_impl();
    min_cell_ = std::min({cell_size_.x, cell_size_.y, cell_size_.z});
    bins_.resize(std::size_t(dims_.volume()));
    for (int t = 0; t < int(mesh_.triangles.size()); ++t) {
        const auto& tri = mesh_.triangles[std::size_t(t)];
        Vec3 lo = mesh_.vertices[tri[0]], hi = lo;
        for (int k = 1; k < 3; ++k) {
            const Vec3 v = mesh_.vertices[tri[k]];
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
        const Int3 c0 = cell_of(lo), c1 = cell_of(hi);
        for (int z = c0.z; z <= c1.z; ++z)
            for (int y = c0.y; y <= c1.y; ++y)
                for (int x = c0.x; x <= c1.x; ++x)
                    bins_[linear_index(dims_, x, y, z)].push_back(t);
    }
}

double MeshDistanceIndex::nearest_dist_sq(Vec3 p, double max_dist) const {
    const Int3 center = cell_of(p);
    double best = max_dist * max_dist * 4.0 + 1.0;  // sentinel above any reported value
    const int k_max = int(std::ceil(max_dist / min_cell_)) + 1;

    for (int k = 0; k <= k_max; ++k) {
        // any cell on ring k is at least (k-1)*min_cell away
        if (k > 0) {
            const double ring_min = double(k - 1) * min_cell_;
            if (ring_min * ring_min > best || ring_min > max_dist) break;
        }
        visit_ring(center, k, [&](std::size_t bin) {
            for (const int t : bins_[bin]) {
                const auto& tri = mesh_.triangles[std::size_t(t)];
                const double d = point_triangle_dist_sq(p, mesh_.vertices[tri[0]],
                                                        mesh_.vertices[tri[1]], mesh_.vertices[tri[2]]);
                if (d < best) best = d;
            }
        });
    }
    return best;
}

Int3 MeshDistanceIndex::cell_of(Vec3 p) const {
    Int3 c;
    for (int a = 0; a < 3; ++a) {
        const double u = (p[a] + bbox_.half[a]) / cell_size_[a];
        c[a] = clamp(int(std::floor(u)), 0, dims_[a] - 1);
    }
    return c;
}

Vec3 MeshDistanceIndex::voxel_size_impl() const {
    return {2.0 * bbox_.half.x / dims_.x, 2.0 * bbox_.half.y / dims_.y, 2.0 * bbox_.half.z / dims_.z};
}

template <typename Fn>
void MeshDistanceIndex::visit_ring(Int3 center, int k, const Fn& fn) const {
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

}  // namespace voxsyn
