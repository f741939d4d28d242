// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "core/grid.h"

#include <cmath>
#include <string>

#include "core/parallel.h"

namespace voxsyn {

VoxelGrid make_voxel_grid(Int3 dims, BBox bbox) {
    if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) throw UsageError("grid dims must be positive");
    validate_bbox(bbox);
    VoxelGrid g;
    g.dims = dims;
    g.bbox = bbox;
    const std::size_t n = g.voxel_count();
    g.density.assign(n, 0.0f);
    g.sh.assign(n * kShCoeffs, 0.0f);
    g.occupied.assign(n, 0);
    return g;
}

void enforce_occupancy(VoxelGrid& grid) {
    const std::size_t n = grid.voxel_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.density[i] >= kDensityThreshold) {
            grid.occupied[i] = 1;
        } else {
            grid.occupied[i] = 0;
            grid.density[i] = 0.0f;
        }
    }
}

FeatureGrid make_feature_grid(Int3 dims, BBox bbox, int channels) {
    if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) throw UsageError("grid dims must be positive");
    if (channels <= 0) throw UsageError("channel count must be positive");
    validate_bbox(bbox);
    FeatureGrid g;
    g.dims = dims;
    g.bbox = bbox;
    g.channels = channels;
    g.data.assign(std::size_t(channels) * std::size_t(dims.volume()), 0.0f);
    return g;
}

MappingField make_mapping_field(Int3 dims, BBox bbox, BBox exemplar_bbox) {
    if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0) throw UsageError("field dims must be positive");
    validate_bbox(bbox);
    validate_bbox(exemplar_bbox);
    MappingField f;
    f.dims = dims;
    f.bbox = bbox;
    f.exemplar_bbox = exemplar_bbox;
    f.coords.assign(std::size_t(dims.volume()) * 3, 0.0);
    return f;
}

Vec3 voxel_center(Int3 dims, const BBox& bbox, Int3 index) {
    if (!in_range(dims, index))
        throw UsageError("voxel index (" + std::to_string(index.x) + "," + std::to_string(index.y) +
                         "," + std::to_string(index.z) + ") out of range");
    const Vec3 v = voxel_size(dims, bbox);
    return {-bbox.half.x + (index.x + 0.5) * v.x, -bbox.half.y + (index.y + 0.5) * v.y,
            -bbox.half.z + (index.z + 0.5) * v.z};
}

Int3 nearest_voxel(Int3 dims, const BBox& bbox, Vec3 p) {
    const Vec3 v = voxel_size(dims, bbox);
    Int3 out;
    for (int a = 0; a < 3; ++a) {
        const double u = (p[a] + bbox.half[a]) / v[a] - 0.5;  // continuous voxel coordinate
        out[a] = clamp(int(std::lround(u)), 0, dims[a] - 1);
    }
    return out;
}

TrilinearSupport trilinear_support(Int3 dims, const BBox& bbox, Vec3 p) {
    const Vec3 v = voxel_size(dims, bbox);
    TrilinearSupport s;
    for (int a = 0; a < 3; ++a) {
        double u = (p[a] + bbox.half[a]) / v[a] - 0.5;
        u = clamp(u, 0.0, double(dims[a] - 1));  // clamp-to-edge beyond outermost centers
        int i0 = int(std::floor(u));
        if (i0 > dims[a] - 2) i0 = dims[a] - 2;
        if (i0 < 0) i0 = 0;
        double f = u - double(i0);
        // snap so exact-center queries return stored values bit-for-bit
        if (f < 1e-9) {
            f = 0.0;
        } else if (f > 1.0 - 1e-9) {
            f = 1.0;
        }
        if (dims[a] == 1) {
            i0 = 0;
            f = 0.0;
        }
        s.i0[a] = i0;
        s.i1[a] = dims[a] == 1 ? 0 : i0 + 1;
        s.w1[a] = f;
    }
    return s;
}

CornerWeights corner_weights(Int3 dims, const TrilinearSupport& s) {
    CornerWeights cw;
    cw.count = 0;
    const double wx1 = s.w1[0], wy1 = s.w1[1], wz1 = s.w1[2];
    const double wx0 = 1.0 - wx1, wy0 = 1.0 - wy1, wz0 = 1.0 - wz1;
    const int xs[2] = {s.i0[0], s.i1[0]};
    const int ys[2] = {s.i0[1], s.i1[1]};
    const int zs[2] = {s.i0[2], s.i1[2]};
    const double wxs[2] = {wx0, wx1};
    const double wys[2] = {wy0, wy1};
    const double wzs[2] = {wz0, wz1};
    for (int cz = 0; cz < 2; ++cz)
        for (int cy = 0; cy < 2; ++cy)
            for (int cx = 0; cx < 2; ++cx) {
                const double w = wxs[cx] * wys[cy] * wzs[cz];
                if (w == 0.0) continue;
                cw.idx[cw.count] = linear_index(dims, xs[cx], ys[cy], zs[cz]);
                cw.w[cw.count] = w;
                ++cw.count;
            }
    return cw;
}

double trilinear_plane(const float* plane, Int3 dims, const TrilinearSupport& s) {
    const CornerWeights cw = corner_weights(dims, s);
    double acc = 0.0;
    for (int k = 0; k < cw.count; ++k) acc += cw.w[k] * double(plane[cw.idx[k]]);
    return acc;
}

void trilinear_interleaved(const float* data, int channels, Int3 dims, const TrilinearSupport& s,
                           double* out) {
    const CornerWeights cw = corner_weights(dims, s);
    for (int c = 0; c < channels; ++c) out[c] = 0.0;
    for (int k = 0; k < cw.count; ++k) {
        const float* v = data + cw.idx[k] * std::size_t(channels);
        const double w = cw.w[k];
        for (int c = 0; c < channels; ++c) out[c] += w * double(v[c]);
    }
}

float sample_density(const VoxelGrid& grid, Vec3 p) {
    const TrilinearSupport s = trilinear_support(grid.dims, grid.bbox, p);
    return float(trilinear_plane(grid.density.data(), grid.dims, s));
}

void sample_voxel(const VoxelGrid& grid, Vec3 p, double* density, double* sh27) {
    const TrilinearSupport s = trilinear_support(grid.dims, grid.bbox, p);
    *density = trilinear_plane(grid.density.data(), grid.dims, s);
    trilinear_interleaved(grid.sh.data(), kShCoeffs, grid.dims, s, sh27);
}

void sample_features(const FeatureGrid& grid, Vec3 p, double* out) {
    const TrilinearSupport s = trilinear_support(grid.dims, grid.bbox, p);
    for (int c = 0; c < grid.channels; ++c) out[c] = trilinear_plane(grid.plane(c), grid.dims, s);
}

Vec3 map_query(const MappingField& field, Vec3 p) {
    const Int3 n = nearest_voxel(field.dims, field.bbox, p);
    const Vec3 center = voxel_center(field.dims, field.bbox, n);
    const Vec3 stored = field.coord_at(linear_index(field.dims, n));
    return field.exemplar_bbox.clamp_point(stored + (p - center));
}

MappingField upsample_mapping(const MappingField& field, Int3 target_dims) {
    if (target_dims.x < field.dims.x || target_dims.y < field.dims.y || target_dims.z < field.dims.z)
        throw UsageError("upsample target dims smaller than source dims");
    MappingField out = make_mapping_field(target_dims, field.bbox, field.exemplar_bbox);
    parallel_chunks(out.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(target_dims, i);
            const Vec3 x = voxel_center(target_dims, out.bbox, idx);
            out.set_coord(i, map_query(field, x));
        }
    });
    return out;
}

MappingField identity_mapping(Int3 dims, BBox bbox, BBox exemplar_bbox) {
    MappingField f = make_mapping_field(dims, bbox, exemplar_bbox);
    for (std::size_t i = 0; i < f.voxel_count(); ++i) {
        const Int3 idx = delinearize(dims, i);
        f.set_coord(i, exemplar_bbox.clamp_point(voxel_center(dims, bbox, idx)));
    }
    return f;
}

VoxelGrid resolve_features(const MappingField& field, const VoxelGrid& exemplar) {
    VoxelGrid out = make_voxel_grid(field.dims, field.bbox);
    parallel_chunks(out.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        double sh27[kShCoeffs];
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(field.dims, i);
            const Vec3 x = voxel_center(field.dims, field.bbox, idx);
            const Vec3 mapped = map_query(field, x);
            double d;
            sample_voxel(exemplar, mapped, &d, sh27);
            out.density[i] = float(d);
            float* dst = out.sh_at(i);
            for (int c = 0; c < kShCoeffs; ++c) dst[c] = float(sh27[c]);
        }
    });
    enforce_occupancy(out);
    return out;
}

FeatureGrid resolve_features(const MappingField& field, const FeatureGrid& exemplar) {
    FeatureGrid out = make_feature_grid(field.dims, field.bbox, exemplar.channels);
    parallel_chunks(out.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(field.dims, i);
            const Vec3 x = voxel_center(field.dims, field.bbox, idx);
            const Vec3 mapped = map_query(field, x);
            const TrilinearSupport s = trilinear_support(exemplar.dims, exemplar.bbox, mapped);
            for (int c = 0; c < exemplar.channels; ++c)
                out.plane(c)[i] = float(trilinear_plane(exemplar.plane(c), exemplar.dims, s));
        }
    });
    return out;
}

std::size_t clamp_coords(MappingField& field) {
    std::size_t moved = 0;
    for (std::size_t i = 0; i < field.voxel_count(); ++i) {
        const Vec3 c = field.coord_at(i);
        const Vec3 cc = field.exemplar_bbox.clamp_point(c);
        if (cc.x != c.x || cc.y != c.y || cc.z != c.z) {
            field.set_coord(i, cc);
            ++moved;
        }
    }
    return moved;
}

}  // namespace voxsyn
