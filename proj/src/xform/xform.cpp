// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "xform/xform.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "core/parallel.h"
#include "xform/mc_tables.h"

namespace voxsyn {

VoxelGrid flood_fill_interior(const VoxelGrid& grid, float high_density) {
    VoxelGrid out = grid;
    const Int3 dims = grid.dims;
    const std::size_t n = grid.voxel_count();

    std::vector<std::uint8_t> reached(n, 0);
    std::vector<std::size_t> queue;
    queue.reserve(n / 4);

    const auto try_push = [&](int x, int y, int z) {
        const std::size_t idx = linear_index(dims, x, y, z);
        if (!reached[idx] && grid.density[idx] < kDensityThreshold) {
            reached[idx] = 1;
            queue.push_back(idx);
        }
    };

    for (int z = 0; z < dims.z; ++z)
        for (int y = 0; y < dims.y; ++y)
            for (int x = 0; x < dims.x; ++x)
                if (x == 0 || y == 0 || z == 0 || x == dims.x - 1 || y == dims.y - 1 || z == dims.z - 1)
                    try_push(x, y, z);

    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Int3 i = delinearize(dims, queue[head]);
        if (i.x > 0) try_push(i.x - 1, i.y, i.z);
        if (i.x < dims.x - 1) try_push(i.x + 1, i.y, i.z);
        if (i.y > 0) try_push(i.x, i.y - 1, i.z);
        if (i.y < dims.y - 1) try_push(i.x, i.y + 1, i.z);
        if (i.z > 0) try_push(i.x, i.y, i.z - 1);
        if (i.z < dims.z - 1) try_push(i.x, i.y, i.z + 1);
    }

    for (std::size_t idx = 0; idx < n; ++idx)
        if (grid.density[idx] < kDensityThreshold && !reached[idx]) out.density[idx] = high_density;
    return out;
}

Mesh marching_cubes(const float* density, Int3 dims, const BBox& bbox, float iso) {
    if (dims.x < 2 || dims.y < 2 || dims.z < 2)
        throw UsageError("marching cubes needs at least 2 voxels per axis");

    Mesh mesh;
    // canonical grid-edge key -> welded vertex index
    std::unordered_map<std::uint64_t, int> edge_vertex;
    const auto edge_key = [&](int x, int y, int z, int axis) {
        return (std::uint64_t(linear_index(dims, x, y, z)) * 3u) + std::uint64_t(axis);
    };

    const Vec3 vsize = voxel_size(dims, bbox);
    const auto corner_pos = [&](int x, int y, int z) {
        return Vec3{-bbox.half.x + (x + 0.5) * vsize.x, -bbox.half.y + (y + 0.5) * vsize.y,
                    -bbox.half.z + (z + 0.5) * vsize.z};
    };

    float corner[8];
    int edge_to_index[12];

    for (int z = 0; z + 1 < dims.z; ++z)
        for (int y = 0; y + 1 < dims.y; ++y)
            for (int x = 0; x + 1 < dims.x; ++x) {
                int cube = 0;
                for (int i = 0; i < 8; ++i) {
                    corner[i] = density[linear_index(dims, x + mc::kCornerShift[i][0],
                                                     y + mc::kCornerShift[i][1],
                                                     z + mc::kCornerShift[i][2])];
                    if (corner[i] < iso) cube |= 1 << i;
                }
                if (cube == 0 || cube == 255) continue;

                for (int e = 0; e < 12; ++e) {
                    if (!(mc::kEdgeTable[cube] & (1 << e))) continue;
                    const int ex = x + mc::kEdgeShift[e][0];
                    const int ey = y + mc::kEdgeShift[e][1];
                    const int ez = z + mc::kEdgeShift[e][2];
                    const std::uint64_t key = edge_key(ex, ey, ez, mc::kEdgeShift[e][3]);
                    auto it = edge_vertex.find(key);
                    if (it == edge_vertex.end()) {
                        const int c0 = mc::kEdgeCorners[e][0];
                        const int c1 = mc::kEdgeCorners[e][1];
                        const double v0 = corner[c0], v1 = corner[c1];
                        double t = v1 != v0 ? (double(iso) - v0) / (v1 - v0) : 0.5;
                        t = clamp(t, 0.0, 1.0);
                        const Vec3 p0 = corner_pos(x + mc::kCornerShift[c0][0], y + mc::kCornerShift[c0][1],
                                                   z + mc::kCornerShift[c0][2]);
                        const Vec3 p1 = corner_pos(x + mc::kCornerShift[c1][0], y + mc::kCornerShift[c1][1],
                                                   z + mc::kCornerShift[c1][2]);
                        it = edge_vertex.emplace(key, int(mesh.vertices.size())).first;
                        mesh.vertices.push_back(p0 + (p1 - p0) * t);
                    }
                    edge_to_index[e] = it->second;
                }

                for (const int* tri = mc::kTriTable[cube]; *tri != -1; tri += 3) {
                    const std::array<int, 3> t = {edge_to_index[tri[0]], edge_to_index[tri[1]],
                                                  edge_to_index[tri[2]]};
                    if (triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) >
                        1e-12)
                        mesh.triangles.push_back(t);
                }
            }
    return mesh;
}

Mesh marching_cubes(const VoxelGrid& grid, float iso) {
    return marching_cubes(grid.density.data(), grid.dims, grid.bbox, iso);
}

std::vector<float> truncated_sdf(const VoxelGrid& filled_grid, const Mesh& mesh, double t) {
    if (t <= 0.0) throw UsageError("truncation scale must be positive");
    const Int3 dims = filled_grid.dims;
    const std::size_t n = filled_grid.voxel_count();
    std::vector<float> g(n, 1.0f);
    if (mesh.empty()) {
        emit_warning("truncated_sdf: empty surface mesh; geometry channel set to +1 everywhere");
        return g;
    }

    const MeshDistanceIndex index(mesh, dims, filled_grid.bbox);
    parallel_chunks(n, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(dims, i);
            const Vec3 p = voxel_center(dims, filled_grid.bbox, idx);
            const double d2 = index.nearest_dist_sq(p, t);
            const double ud = std::sqrt(d2);
            const bool inside = filled_grid.density[i] >= kDensityThreshold;
            const double sd = inside ? -ud : ud;
            g[i] = float(clamp(sd / t, -1.0, 1.0));
        }
    });
    return g;
}

std::array<float, kShCoeffs> normalize_sh(const float* sh) {
    double norm_sq = 0.0;
    for (int c = 0; c < kShCoeffs; ++c) norm_sq += double(sh[c]) * double(sh[c]);
    std::array<float, kShCoeffs> out{};
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-8) return out;
    for (int c = 0; c < kShCoeffs; ++c) out[c] = float(double(sh[c]) / norm);
    return out;
}

PcaModel pca_fit(const std::vector<std::array<float, kShCoeffs>>& samples, int k) {
    if (k <= 0 || k > kShCoeffs) throw UsageError("pca component count out of range");
    if (int(samples.size()) < k)
        throw UsageError("pca_fit needs at least " + std::to_string(k) + " samples, got " +
                         std::to_string(samples.size()));

    PcaModel model;
    const double inv_n = 1.0 / double(samples.size());
    for (const auto& s : samples)
        for (int c = 0; c < kShCoeffs; ++c) model.mean[c] += double(s[c]) * inv_n;

    Eigen::Matrix<double, kShCoeffs, kShCoeffs> cov;
    cov.setZero();
    for (const auto& s : samples) {
        Eigen::Matrix<double, kShCoeffs, 1> d;
        for (int c = 0; c < kShCoeffs; ++c) d(c) = double(s[c]) - model.mean[c];
        cov.noalias() += d * d.transpose();
    }
    cov *= inv_n;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, kShCoeffs, kShCoeffs>> solver(cov);
    // eigenvalues ascend; take the top k in descending order
    model.basis.resize(std::size_t(k));
    for (int r = 0; r < k; ++r) {
        const auto col = solver.eigenvectors().col(kShCoeffs - 1 - r);
        auto& row = model.basis[std::size_t(r)];
        int arg = 0;
        for (int c = 0; c < kShCoeffs; ++c) {
            row[c] = col(c);
            if (std::abs(row[c]) > std::abs(row[arg])) arg = c;
        }
        if (row[arg] < 0.0)
            for (int c = 0; c < kShCoeffs; ++c) row[c] = -row[c];
    }
    return model;
}

Vec3 pca_project(const PcaModel& model, const float* sh) {
    Vec3 out;
    for (int r = 0; r < model.components() && r < 3; ++r) {
        double acc = 0.0;
        for (int c = 0; c < kShCoeffs; ++c)
            acc += model.basis[std::size_t(r)][c] * (double(sh[c]) - model.mean[c]);
        out[r] = acc;
    }
    return out;
}

double dominant_voxel_size(Int3 dims, const BBox& bbox) {
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (dims[a] > dims[axis]) axis = a;
    return 2.0 * bbox.half[axis] / dims[axis];
}

std::vector<std::array<float, kShCoeffs>> occupied_sh_samples(const VoxelGrid& grid) {
    std::vector<std::array<float, kShCoeffs>> samples;
    for (std::size_t i = 0; i < grid.voxel_count(); ++i)
        if (grid.occupied[i]) samples.push_back(normalize_sh(grid.sh_at(i)));
    return samples;
}

TransformedGrid transform_exemplar(const VoxelGrid& grid, double t_multiplier, const PcaModel& pca) {
    const VoxelGrid filled = flood_fill_interior(grid);
    const Mesh mesh = marching_cubes(filled, kDensityThreshold);
    const double t = t_multiplier * dominant_voxel_size(grid.dims, grid.bbox);
    const std::vector<float> g = truncated_sdf(filled, mesh, t);

    TransformedGrid out = make_feature_grid(grid.dims, grid.bbox, kTransformedChannels);
    std::copy(g.begin(), g.end(), out.plane(kGeometryChannel));

    float* a0 = out.plane(1);
    float* a1 = out.plane(2);
    float* a2 = out.plane(3);
    parallel_chunks(grid.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            if (!grid.occupied[i]) continue;  // planes start zeroed
            const auto normalized = normalize_sh(grid.sh_at(i));
            const Vec3 a = pca_project(pca, normalized.data());
            a0[i] = float(a.x);
            a1[i] = float(a.y);
            a2[i] = float(a.z);
        }
    });
    return out;
}

}  // namespace voxsyn
