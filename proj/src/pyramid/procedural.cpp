// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "pyramid/procedural.h"

#include <algorithm>
#include <cmath>

#include "core/parallel.h"
#include "core/rng.h"

namespace voxsyn {

namespace {

constexpr double kShDc = 0.28209479177387814;  // Y_0, so DC = albedo / kShDc
constexpr double kShellWidth = 0.025;          // world-unit density transition width
constexpr double kSolidDensity = 8.0;

double lattice_value(std::uint64_t seed, std::int64_t xi, std::int64_t yi, std::int64_t zi) {
    std::uint64_t s = seed;
    s ^= 0x9e3779b97f4a7c15ull * std::uint64_t(xi + 0x10000);
    s ^= 0xc2b2ae3d27d4eb4full * std::uint64_t(yi + 0x10000);
    s ^= 0x165667b19e3779f9ull * std::uint64_t(zi + 0x10000);
    return double(splitmix64(s) >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// 2D value noise on a unit lattice; x, y in lattice units.
double value_noise2(std::uint64_t seed, double x, double y) {
    const double fx = std::floor(x), fy = std::floor(y);
    const std::int64_t xi = std::int64_t(fx), yi = std::int64_t(fy);
    const double tx = smooth(x - fx), ty = smooth(y - fy);
    const double v00 = lattice_value(seed, xi, yi, 0);
    const double v10 = lattice_value(seed, xi + 1, yi, 0);
    const double v01 = lattice_value(seed, xi, yi + 1, 0);
    const double v11 = lattice_value(seed, xi + 1, yi + 1, 0);
    return (v00 * (1 - tx) + v10 * tx) * (1 - ty) + (v01 * (1 - tx) + v11 * tx) * ty;
}

double fbm2(std::uint64_t seed, double x, double y, int octaves) {
    double sum = 0.0, amp = 1.0, freq = 1.0, total = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise2(seed + std::uint64_t(o) * 0x9e37ull, x * freq, y * freq);
        total += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    return sum / total;
}

// hard shell at signed distance d (positive = inside), soft over kShellWidth
double shell_density(double d) {
    return kSolidDensity * clamp(d / kShellWidth * 0.5 + 0.5, 0.0, 1.0);
}

struct Rgb {
    double r, g, b;
};

void write_color(VoxelGrid& grid, std::size_t idx, const Rgb& albedo, double dir_variation) {
    float* sh = grid.sh_at(idx);
    const double c[3] = {albedo.r, albedo.g, albedo.b};
    for (int ch = 0; ch < 3; ++ch) {
        sh[ch * 9 + 0] = float(c[ch] / kShDc);
        // mild degree-1 term for view dependence
        sh[ch * 9 + 2] = float(dir_variation * c[ch] / kShDc);
    }
}

Rgb mix(const Rgb& a, const Rgb& b, double t) {
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

void fill_terrain(VoxelGrid& grid, std::uint64_t seed) {
    const Int3 dims = grid.dims;
    const BBox& bbox = grid.bbox;
    const double zlo = -bbox.half.z, zspan = 2.0 * bbox.half.z;

    const Rgb grass{0.22, 0.44, 0.16}, rock{0.46, 0.38, 0.30}, snow{0.86, 0.86, 0.90};

    parallel_chunks(std::size_t(dims.x) * std::size_t(dims.y), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t col = b; col < e; ++col) {
            const int x = int(col % std::size_t(dims.x));
            const int y = int(col / std::size_t(dims.x));
            const Vec3 base = voxel_center(dims, bbox, {x, y, 0});
            const double u = (base.x + bbox.half.x) / (2.0 * bbox.half.x);
            const double v = (base.y + bbox.half.y) / (2.0 * bbox.half.y);

            // height in [0.12, 0.72] of the box, leaving the top layers empty
            const double hn = fbm2(seed, u * 4.0, v * 4.0, 4);
            const double ridge = std::abs(fbm2(seed ^ 0xabcdull, u * 9.0, v * 9.0, 3) - 0.5) * 2.0;
            const double height = 0.12 + 0.60 * clamp(0.72 * hn + 0.38 * (1.0 - ridge), 0.0, 1.0);
            const double z_surface = zlo + height * zspan;

            const double color_t = clamp((height - 0.18) / 0.45, 0.0, 1.0);
            const double speckle = value_noise2(seed ^ 0x77ull, u * 24.0, v * 24.0);
            Rgb albedo = color_t < 0.5 ? mix(grass, rock, color_t * 2.0)
                                       : mix(rock, snow, (color_t - 0.5) * 2.0);
            albedo = mix(albedo, Rgb{albedo.r * 0.6, albedo.g * 0.6, albedo.b * 0.6}, speckle * 0.35);

            for (int z = 0; z < dims.z; ++z) {
                const std::size_t idx = linear_index(dims, x, y, z);
                const double zc = voxel_center(dims, bbox, {x, y, z}).z;
                const double density = shell_density(z_surface - zc);
                if (density <= 0.0) continue;
                grid.density[idx] = float(density);
                write_color(grid, idx, albedo, 0.12 * (speckle - 0.5));
            }
        }
    });
}

void fill_arches(VoxelGrid& grid, std::uint64_t seed) {
    const Int3 dims = grid.dims;
    const BBox& bbox = grid.bbox;
    const double zlo = -bbox.half.z;
    const double ground_z = zlo + 0.16 * 2.0 * bbox.half.z;

    struct Arch {
        Vec3 center;
        Vec3 dir;  // horizontal unit direction of the arch plane
        double major, minor;
        Rgb color;
    };
    Rng rng(seed, 0x42);
    const int n_arches = 5 + int(rng.uniform_int(0, 3));
    std::vector<Arch> arches;
    const double max_r = 0.30 * std::min(bbox.half.x, bbox.half.y);
    for (int i = 0; i < n_arches; ++i) {
        Arch a;
        a.center = {(rng.uniform() * 1.4 - 0.7) * bbox.half.x,
                    (rng.uniform() * 1.4 - 0.7) * bbox.half.y, ground_z};
        const double theta = rng.uniform() * 3.14159265358979323846;
        a.dir = {std::cos(theta), std::sin(theta), 0.0};
        a.major = (0.45 + 0.55 * rng.uniform()) * max_r;
        a.minor = (0.22 + 0.20 * rng.uniform()) * a.major;
        const double tone = rng.uniform();
        a.color = mix(Rgb{0.58, 0.28, 0.18}, Rgb{0.72, 0.58, 0.42}, tone);
        arches.push_back(a);
    }

    const Rgb sand{0.62, 0.54, 0.36};

    parallel_chunks(grid.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(dims, i);
            const Vec3 p = voxel_center(dims, bbox, idx);
            const double u = (p.x + bbox.half.x) / (2.0 * bbox.half.x);
            const double v = (p.y + bbox.half.y) / (2.0 * bbox.half.y);

            const double ripple = 0.02 * (fbm2(seed ^ 0x5151ull, u * 6.0, v * 6.0, 3) - 0.5);
            double density = shell_density(ground_z + ripple * bbox.half.z - p.z);
            Rgb albedo = sand;

            for (const Arch& a : arches) {
                const Vec3 d = p - a.center;
                const double s = dot(d, a.dir);
                const double w_off = d.x * (-a.dir.y) + d.y * a.dir.x;
                const double in_plane = std::sqrt(s * s + d.z * d.z);
                const double dist = std::sqrt((in_plane - a.major) * (in_plane - a.major) + w_off * w_off);
                const double arch_density = shell_density(a.minor - dist);
                if (arch_density > density) {
                    density = arch_density;
                    albedo = a.color;
                }
            }

            if (density <= 0.0) continue;
            grid.density[i] = float(density);
            write_color(grid, i, albedo, 0.1 * (value_noise2(seed ^ 0x99ull, u * 20.0, v * 20.0) - 0.5));
        }
    });
}

void fill_blobs(VoxelGrid& grid, std::uint64_t seed) {
    const Int3 dims = grid.dims;
    const BBox& bbox = grid.bbox;

    struct Blob {
        Vec3 center;
        double radius;
        Rgb color;
    };
    Rng rng(seed, 0x1001);
    const int n_blobs = 10 + int(rng.uniform_int(0, 5));
    std::vector<Blob> blobs;
    const double min_half = std::min({bbox.half.x, bbox.half.y, bbox.half.z});
    const Rgb palette[5] = {{0.75, 0.25, 0.22}, {0.22, 0.55, 0.70}, {0.85, 0.68, 0.20},
                            {0.35, 0.60, 0.28}, {0.55, 0.35, 0.62}};
    for (int i = 0; i < n_blobs; ++i) {
        Blob b;
        b.center = {(rng.uniform() * 1.3 - 0.65) * bbox.half.x,
                    (rng.uniform() * 1.3 - 0.65) * bbox.half.y,
                    (rng.uniform() * 1.3 - 0.65) * bbox.half.z};
        b.radius = (0.2 + 0.45 * rng.uniform()) * min_half;
        b.color = palette[rng.uniform_int(0, 4)];
        blobs.push_back(b);
    }

    parallel_chunks(grid.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 idx = delinearize(dims, i);
            const Vec3 p = voxel_center(dims, bbox, idx);
            double density = 0.0;
            Rgb albedo{0, 0, 0};
            for (const Blob& blob : blobs) {
                const double d = shell_density(blob.radius - norm(p - blob.center));
                if (d > density) {
                    density = d;
                    albedo = blob.color;
                }
            }
            if (density <= 0.0) continue;
            grid.density[i] = float(density);
            write_color(grid, i, albedo, 0.0);
        }
    });
}

}  // namespace

ExemplarKind parse_exemplar_kind(const std::string& name) {
    if (name == "terrain") return ExemplarKind::kTerrain;
    if (name == "arches") return ExemplarKind::kArches;
    if (name == "blobs") return ExemplarKind::kBlobs;
    throw UsageError("unknown exemplar kind '" + name + "' (expected terrain, arches or blobs)");
}

VoxelGrid procedural_exemplar(ExemplarKind kind, Int3 dims, std::uint64_t seed) {
    if (dims.x < 16 || dims.y < 16 || dims.z < 16)
        throw UsageError("procedural exemplars need dims >= 16 per axis");
    VoxelGrid grid = make_voxel_grid(dims, normalized_bbox(dims));
    switch (kind) {
        case ExemplarKind::kTerrain: fill_terrain(grid, seed); break;
        case ExemplarKind::kArches: fill_arches(grid, seed); break;
        case ExemplarKind::kBlobs: fill_blobs(grid, seed); break;
    }
    enforce_occupancy(grid);
    return grid;
}

}  // namespace voxsyn
