// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "render/render.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/parallel.h"
#include "kernels/kernels.h"

namespace voxsyn {

namespace {

// real SH basis constants, degree <= 2
constexpr double kSh0 = 0.28209479177387814;
constexpr double kSh1 = 0.4886025119029199;
constexpr double kSh2_xy = 1.0925484305920792;
constexpr double kSh2_z2 = 0.31539156525252005;
constexpr double kSh2_x2y2 = 0.5462742152960396;

struct RayFrame {
    Vec3 right, up, forward;
};

RayFrame camera_frame(const Camera& cam) {
    const Vec3 forward = normalized(cam.look_at - cam.position);
    Vec3 up_hint = cam.up;
    Vec3 right = cross(forward, up_hint);
    if (norm2(right) < 1e-12) {
        up_hint = std::abs(forward.y) < 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
        right = cross(forward, up_hint);
    }
    right = normalized(right);
    return {right, cross(right, forward), forward};
}

bool intersect_box(const BBox& box, Vec3 origin, Vec3 dir, double* t0, double* t1) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dir[a]) < 1e-300) {
            if (std::abs(origin[a]) > box.half[a]) return false;
            continue;
        }
        const double inv = 1.0 / dir[a];
        double ta = (-box.half[a] - origin[a]) * inv;
        double tb = (box.half[a] - origin[a]) * inv;
        if (ta > tb) std::swap(ta, tb);
        lo = std::max(lo, ta);
        hi = std::min(hi, tb);
    }
    if (hi <= lo) return false;
    *t0 = lo;
    *t1 = hi;
    return true;
}

// one radiance fetch: density plus clamped SH color for direction d
template <typename FetchFn>
Image render_impl(const BBox& box, const Camera& cam, double step, const FetchFn& fetch) {
    Image img;
    img.width = cam.width;
    img.height = cam.height;
    img.rgb.assign(std::size_t(cam.width) * cam.height * 3, 0.0f);
    const RayFrame frame = camera_frame(cam);

    parallel_chunks(std::size_t(cam.height), [&](int, std::size_t rb, std::size_t re) {
        double sh27[kShCoeffs];
        for (std::size_t y = rb; y < re; ++y) {
            for (int x = 0; x < cam.width; ++x) {
                const Vec3 dir = normalized(frame.forward * cam.focal +
                                            frame.right * (x + 0.5 - cam.width * 0.5) +
                                            frame.up * (cam.height * 0.5 - double(y) - 0.5));
                double r = 0.0, g = 0.0, b = 0.0, transmittance = 1.0;
                double t0, t1;
                if (intersect_box(box, cam.position, dir, &t0, &t1)) {
                    double t = t0;
                    while (t < t1 && transmittance > 1e-6) {
                        const double seg = std::min(step, t1 - t);
                        const Vec3 p = cam.position + dir * (t + 0.5 * seg);
                        double density;
                        fetch(p, &density, sh27);
                        if (density > 0.0) {
                            const double atten = std::exp(-density * seg);
                            double rgb[3];
                            eval_sh(sh27, dir, rgb);
                            const double w = transmittance * (1.0 - atten);
                            r += w * rgb[0];
                            g += w * rgb[1];
                            b += w * rgb[2];
                            transmittance *= atten;
                        }
                        t += seg;
                    }
                }
                // white background behind the residual transmittance
                float* px = img.pixel(x, int(y));
                px[0] = float(clamp(r + transmittance, 0.0, 1.0));
                px[1] = float(clamp(g + transmittance, 0.0, 1.0));
                px[2] = float(clamp(b + transmittance, 0.0, 1.0));
            }
        }
    });
    return img;
}

double default_step(Int3 dims, const BBox& box, double step) {
    if (step > 0.0) return step;
    const Vec3 v = voxel_size(dims, box);
    return 0.5 * std::min({v.x, v.y, v.z});
}

void fetch_grid(const VoxelGrid& grid, Vec3 p, double* density, double* sh27) {
    const TrilinearSupport s = trilinear_support(grid.dims, grid.bbox, p);
    const CornerWeights cw = corner_weights(grid.dims, s);
    double acc = 0.0;
    const float* corners[8];
    for (int k = 0; k < cw.count; ++k) {
        acc += cw.w[k] * double(grid.density[cw.idx[k]]);
        corners[k] = grid.sh_at(cw.idx[k]);
    }
    *density = acc;
    kern::active_kernels().weighted_gather(corners, cw.w, cw.count, kShCoeffs, sh27);
}

}  // namespace

void eval_sh(const double* sh27, Vec3 d, double* rgb) {
    const double x = d.x, y = d.y, z = d.z;
    const double basis[9] = {
        kSh0,           kSh1 * y,           kSh1 * z,
        kSh1 * x,       kSh2_xy * x * y,    kSh2_xy * y * z,
        kSh2_z2 * (3.0 * z * z - 1.0),      kSh2_xy * x * z,
        kSh2_x2y2 * (x * x - y * y),
    };
    for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int k = 0; k < 9; ++k) acc += sh27[c * 9 + k] * basis[k];
        rgb[c] = clamp(acc, 0.0, 1.0);
    }
}

Image render(const VoxelGrid& grid, const Camera& camera, double step) {
    const double s = default_step(grid.dims, grid.bbox, step);
    return render_impl(grid.bbox, camera, s,
                       [&](Vec3 p, double* density, double* sh27) { fetch_grid(grid, p, density, sh27); });
}

Image render(const MappingField& field, const VoxelGrid& exemplar, const Camera& camera,
             double step) {
    const double s = default_step(field.dims, field.bbox, step);
    return render_impl(field.bbox, camera, s, [&](Vec3 p, double* density, double* sh27) {
        fetch_grid(exemplar, map_query(field, p), density, sh27);
    });
}

std::vector<Camera> sample_cameras(int count, double radius, double focal, int width, int height) {
    if (count < 1) throw UsageError("camera count must be >= 1");
    if (!(radius > 0.0) || !(focal > 0.0)) throw UsageError("radius and focal must be positive");
    std::vector<Camera> cams;
    cams.reserve(std::size_t(count));
    const double golden = 3.14159265358979323846 * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        // z descends from the zenith; K=1 is exactly the zenith pose
        const double z = 1.0 - double(i) / double(count);
        const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double azimuth = golden * double(i);
        Camera cam;
        cam.position = Vec3{ring * std::cos(azimuth), ring * std::sin(azimuth), z} * radius;
        cam.look_at = {0, 0, 0};
        cam.up = {0, 0, 1};
        cam.focal = focal;
        cam.width = width;
        cam.height = height;
        cams.push_back(cam);
    }
    return cams;
}

double psnr(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height) throw UsageError("image sizes differ");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.rgb.size(); ++i) {
        const double d = double(a.rgb[i]) - double(b.rgb[i]);
        mse += d * d;
    }
    mse /= double(a.rgb.size());
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace voxsyn
