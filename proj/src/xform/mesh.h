// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/bbox.h"
#include "core/vec.h"

namespace voxsyn {

// Triangle surface in world coordinates. Construction drops degenerate
// triangles (area <= 1e-12).
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    bool empty() const { return triangles.empty(); }
};

double triangle_area(Vec3 a, Vec3 b, Vec3 c);
double mesh_area(const Mesh& mesh);

// Closest point on triangle abc to p (Ericson's region test).
Vec3 closest_point_on_triangle(Vec3 p, Vec3 a, Vec3 b, Vec3 c);
double point_triangle_dist_sq(Vec3 p, Vec3 a, Vec3 b, Vec3 c);

// ASCII OBJ (v/f records) for inspection and the metrics pipeline.
void write_obj(const std::string& path, const Mesh& mesh);

// Exact nearest-triangle queries accelerated by uniform-grid binning.
// Distances are exact whenever they are <= max_dist; beyond that the query
// reports "far" without spending time on an answer nobody reads.
class MeshDistanceIndex {
public:
    // Cells align with the voxel grid the mesh was extracted from.
    MeshDistanceIndex(const Mesh& mesh, Int3 grid_dims, const BBox& bbox);

    // Squared distance to the nearest triangle, exact if <= max_dist^2;
    // returns a value > max_dist^2 otherwise.
    double nearest_dist_sq(Vec3 p, double max_dist) const;

private:
    Int3 cell_of(Vec3 p) const;
    Vec3 voxel_size_impl() const;
    template <typename Fn>
    void visit_ring(Int3 center, int k, const Fn& fn) const;

    const Mesh& mesh_;
    Int3 dims_;
    BBox bbox_;
    Vec3 cell_size_;
    double min_cell_ = 0.0;
    std::vector<std::vector<int>> bins_;
};

}  // namespace voxsyn
