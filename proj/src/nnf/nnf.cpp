// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "nnf/nnf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/parallel.h"
#include "core/rng.h"
#include "kernels/kernels.h"

namespace voxsyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (a + 1)) ^ (0xc2b2ae3d27d4eb4full * (b + 1));
    return splitmix64(s);
}

Int3 clamp_to_box(Int3 v, Int3 box) {
    return {clamp(v.x, 0, box.x - 1), clamp(v.y, 0, box.y - 1), clamp(v.z, 0, box.z - 1)};
}

// lattice helpers for patch views into a channel-planar volume
struct VolumeLattice {
    const FeatureGrid& vol;
    int p;
    Int3 box;  // patch-offset lattice dims

    explicit VolumeLattice(const FeatureGrid& v, int patch)
        : vol(v), p(patch), box{v.dims.x - patch + 1, v.dims.y - patch + 1, v.dims.z - patch + 1} {
        if (v.dims.x < patch || v.dims.y < patch || v.dims.z < patch)
            throw UsageError("volume dims must be >= patch edge on every axis");
    }

    kern::PatchView view(Int3 offset) const {
        kern::PatchView pv;
        pv.base = vol.plane(0) + linear_index(vol.dims, offset);
        pv.sy = std::size_t(vol.dims.x);
        pv.sz = std::size_t(vol.dims.x) * std::size_t(vol.dims.y);
        pv.sc = vol.voxel_count();
        return pv;
    }
};

}  // namespace

void require_exact_budget(std::int64_t m_q, std::int64_t m_k, std::int64_t budget) {
    if (m_q <= 0 || m_k <= 0) throw UsageError("empty patch set");
    if (m_q > budget / m_k)
        throw CapacityError("exact NNF would touch " + std::to_string(m_q) + " x " +
                            std::to_string(m_k) +
                            " patch pairs, above the configured element budget of " +
                            std::to_string(budget) + "; use approximate_nnf at this resolution");
}

NnfResult exact_nnf(const PatchSet& queries, const PatchSet& keys, double w_a, double alpha,
                    std::int64_t budget) {
    if (queries.p != keys.p || queries.channels != keys.channels)
        throw UsageError("query and key patch sets must share patch edge and channels");
    if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
    const std::int64_t m_q = queries.count, m_k = keys.count;
    require_exact_budget(m_q, m_k, budget);

    const auto& kernels = kern::active_kernels();
    const std::size_t n_geo = std::size_t(queries.p) * queries.p * queries.p;
    const std::size_t n_app = n_geo * std::size_t(queries.channels - 1);
    // key blocks sized to stay resident in L2 across a run of queries
    const std::int64_t block = std::max<std::int64_t>(1, (1 << 19) / queries.feature_dim / 4);

    std::vector<Vec3> key_centers(std::size_t(m_k), Vec3{});
    for (std::int64_t j = 0; j < m_k; ++j) key_centers[std::size_t(j)] = keys.center_world(j);

    // pass 1: per-key minimum distance over all queries (streamed, blocked).
    // Every column is seeded with the geometrically aligned query first;
    // on near-reconstruction volumes that pins the minima at once and the
    // scan degenerates to bound checks.
    std::vector<double> denom(std::size_t(m_k), kInf);
    {
        const Int3 q_box = queries.center_box();
        const int q_half = queries.p / 2;
        parallel_chunks(std::size_t(m_k), [&](int, std::size_t b, std::size_t e) {
            for (std::size_t j = b; j < e; ++j) {
                const Int3 qv = nearest_voxel(queries.grid_dims, queries.bbox, key_centers[j]);
                const Int3 off = clamp_to_box({qv.x - q_half, qv.y - q_half, qv.z - q_half}, q_box);
                const std::int64_t i = std::int64_t(linear_index(q_box, off));
                denom[j] = kernels.row_distance(queries.row(i), keys.row(std::int64_t(j)), n_geo,
                                                n_app, w_a, kInf);
            }
        });

        std::vector<std::vector<double>> partial{std::size_t(max_threads())};
        parallel_chunks(std::size_t(m_q), [&](int w, std::size_t b, std::size_t e) {
            auto& col_min = partial[std::size_t(w)];
            if (col_min.empty()) col_min = denom;
            for (std::int64_t j0 = 0; j0 < m_k; j0 += block) {
                const std::int64_t j1 = std::min(m_k, j0 + block);
                for (std::size_t i = b; i < e; ++i) {
                    const float* q = queries.row(std::int64_t(i));
                    for (std::int64_t j = j0; j < j1; ++j) {
                        const double bound = col_min[std::size_t(j)];
                        if (bound <= 0.0) continue;
                        const double d =
                            kernels.row_distance(q, keys.row(j), n_geo, n_app, w_a, bound);
                        if (d < bound) col_min[std::size_t(j)] = d;
                    }
                }
            }
        });
        for (const auto& col_min : partial)
            if (!col_min.empty()) kernels.min_inplace(denom.data(), col_min.data(), std::size_t(m_k));
        for (std::int64_t j = 0; j < m_k; ++j) denom[std::size_t(j)] += alpha;
    }

    // pass 2: per-query argmin of the normalized score, lexicographic
    // tie-break (score, squared center distance, index). The scan seeds each
    // query with the geometrically aligned key so duplicate-heavy regions
    // (score 0, center distance 0) skip the rest of the row outright; other
    // zero-score ties are prefiltered by center distance without touching
    // features. The early-out bound carries a small relative slack so
    // near-ties are still evaluated exactly before the tie-break.
    NnfResult out;
    out.assignment.assign(std::size_t(m_q), -1);
    out.distance.assign(std::size_t(m_q), kInf);
    const Int3 k_box = keys.center_box();
    const int half = queries.p / 2;

    parallel_chunks(std::size_t(m_q), [&](int, std::size_t b, std::size_t e) {
        const std::size_t count = e - b;
        std::vector<double> best_score(count, kInf), best_d(count, kInf), best_c2(count, kInf);
        std::vector<std::int64_t> best_j(count, -1);
        std::vector<Vec3> q_center(count, Vec3{});

        for (std::size_t i = b; i < e; ++i) {
            const std::size_t s = i - b;
            q_center[s] = queries.center_world(std::int64_t(i));
            const Int3 kv = nearest_voxel(keys.grid_dims, keys.bbox, q_center[s]);
            const Int3 seed_off = clamp_to_box({kv.x - half, kv.y - half, kv.z - half}, k_box);
            const std::int64_t j = std::int64_t(linear_index(k_box, seed_off));
            const double d = kernels.row_distance(queries.row(std::int64_t(i)), keys.row(j), n_geo,
                                                  n_app, w_a, kInf);
            best_score[s] = d / denom[std::size_t(j)];
            best_d[s] = d;
            best_j[s] = j;
            best_c2[s] = norm2(key_centers[std::size_t(j)] - q_center[s]);
        }

        for (std::int64_t j0 = 0; j0 < m_k; j0 += block) {
            const std::int64_t j1 = std::min(m_k, j0 + block);
            for (std::size_t i = b; i < e; ++i) {
                const std::size_t s = i - b;
                if (best_score[s] == 0.0 && best_c2[s] == 0.0) continue;
                const float* q = queries.row(std::int64_t(i));
                for (std::int64_t j = j0; j < j1; ++j) {
                    const double dj = denom[std::size_t(j)];
                    double c2 = -1.0;
                    double bound;
                    if (best_score[s] == 0.0) {
                        // nothing beats zero; only a closer-center tie matters
                        c2 = norm2(key_centers[std::size_t(j)] - q_center[s]);
                        if (c2 >= best_c2[s]) continue;
                        bound = 1e-300;
                    } else {
                        bound = best_score[s] * dj * 1.0000001 + 1e-300;
                    }
                    const double d = kernels.row_distance(q, keys.row(j), n_geo, n_app, w_a, bound);
                    if (d >= bound) continue;
                    const double score = d / dj;
                    if (score > best_score[s]) continue;
                    if (c2 < 0.0) c2 = norm2(key_centers[std::size_t(j)] - q_center[s]);
                    if (score == best_score[s]) {
                        if (c2 > best_c2[s]) continue;
                        if (c2 == best_c2[s] && j >= best_j[s]) continue;
                    }
                    best_score[s] = score;
                    best_d[s] = d;
                    best_c2[s] = c2;
                    best_j[s] = j;
                }
            }
        }

        for (std::size_t i = b; i < e; ++i) {
            out.assignment[i] = best_j[i - b];
            out.distance[i] = best_d[i - b];
        }
    });
    out.kind = NnfResult::Kind::kValueIteration;
    return out;
}

NnfResult approximate_nnf(const FeatureGrid& query_volume, const FeatureGrid& key_volume, int p,
                          double w_a, const std::vector<std::int64_t>* prev, std::uint64_t seed,
                          int sweeps, std::vector<std::vector<double>>* sweep_distances) {
    if (query_volume.channels != key_volume.channels)
        throw UsageError("query and key volumes must share channel count");
    const VolumeLattice q_lat(query_volume, p);
    const VolumeLattice k_lat(key_volume, p);
    const std::int64_t m_q = q_lat.box.volume();
    const std::int64_t m_k [[maybe_unused]] = k_lat.box.volume();
    const int channels = query_volume.channels;
    const auto& kernels = kern::active_kernels();

    NnfResult out;
    out.assignment.assign(std::size_t(m_q), 0);
    out.distance.assign(std::size_t(m_q), kInf);

    if (prev) {
        if (std::int64_t(prev->size()) != m_q)
            throw UsageError("previous assignment size does not match query lattice");
        for (std::size_t i = 0; i < prev->size(); ++i)
            out.assignment[i] =
                linear_index(k_lat.box, clamp_to_box(delinearize(k_lat.box, std::size_t((*prev)[i])),
                                                     k_lat.box));
    } else {
        for (std::int64_t i = 0; i < m_q; ++i) {
            Rng rng(seed, 0x5eedull, std::uint64_t(i));
            const Int3 c{int(rng.uniform_int(0, k_lat.box.x - 1)),
                         int(rng.uniform_int(0, k_lat.box.y - 1)),
                         int(rng.uniform_int(0, k_lat.box.z - 1))};
            out.assignment[std::size_t(i)] = linear_index(k_lat.box, c);
        }
    }

    parallel_chunks(std::size_t(m_q), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 q_off = delinearize(q_lat.box, i);
            const Int3 k_off = delinearize(k_lat.box, std::size_t(out.assignment[i]));
            out.distance[i] =
                kernels.patch_distance(q_lat.view(q_off), k_lat.view(k_off), p, channels, w_a, kInf);
        }
    });

    static constexpr int kJumpRadii[4] = {8, 4, 2, 1};

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        // jump-flood propagation; serialized so later queries see earlier
        // adoptions within the sweep, scan order alternating per sweep
        const bool forward = (sweep % 2) == 0;
        for (std::int64_t ord = 0; ord < m_q; ++ord) {
            const std::size_t qi = std::size_t(forward ? ord : m_q - 1 - ord);
            const Int3 q_off = delinearize(q_lat.box, qi);
            const kern::PatchView q_view = q_lat.view(q_off);
            for (const int radius : kJumpRadii) {
                for (int axis = 0; axis < 3; ++axis) {
                    for (int sign = -1; sign <= 1; sign += 2) {
                        Int3 n_off = q_off;
                        n_off[axis] = clamp(q_off[axis] - sign * radius, 0, q_lat.box[axis] - 1);
                        if (n_off[axis] == q_off[axis]) continue;
                        const Int3 shift = q_off - n_off;
                        const std::int64_t neighbor = out.assignment[linear_index(q_lat.box, n_off)];
                        const Int3 cand =
                            clamp_to_box(delinearize(k_lat.box, std::size_t(neighbor)) + shift,
                                         k_lat.box);
                        const std::int64_t cj = std::int64_t(linear_index(k_lat.box, cand));
                        if (cj == out.assignment[qi]) continue;
                        const double d = kernels.patch_distance(q_view, k_lat.view(cand), p, channels,
                                                                w_a, out.distance[qi]);
                        if (d < out.distance[qi]) {
                            out.distance[qi] = d;
                            out.assignment[qi] = cj;
                        }
                    }
                }
            }
        }

        // random search around the incumbent, radius halving; per-query RNG
        // streams keep the result independent of the parallel partition
        parallel_chunks(std::size_t(m_q), [&](int, std::size_t b, std::size_t e) {
            for (std::size_t qi = b; qi < e; ++qi) {
                Rng rng(seed, std::uint64_t(sweep) + 1, std::uint64_t(qi));
                const Int3 q_off = delinearize(q_lat.box, qi);
                const kern::PatchView q_view = q_lat.view(q_off);
                Int3 best = delinearize(k_lat.box, std::size_t(out.assignment[qi]));
                for (int radius = k_lat.box.max_dim(); radius >= 1; radius >>= 1) {
                    const Int3 jitter{int(rng.uniform_int(-radius, radius)),
                                      int(rng.uniform_int(-radius, radius)),
                                      int(rng.uniform_int(-radius, radius))};
                    const Int3 cand = clamp_to_box(best + jitter, k_lat.box);
                    if (cand == best) continue;
                    const double d = kernels.patch_distance(q_view, k_lat.view(cand), p, channels,
                                                            w_a, out.distance[qi]);
                    if (d < out.distance[qi]) {
                        out.distance[qi] = d;
                        out.assignment[qi] = std::int64_t(linear_index(k_lat.box, cand));
                        best = cand;
                    }
                }
            }
        });

        if (sweep_distances) sweep_distances->push_back(out.distance);
    }

    out.kind = NnfResult::Kind::kValueIteration;
    return out;
}

FeatureGrid blend_values(const NnfResult& result, const FeatureGrid& key_volume, Int3 out_dims,
                         const BBox& out_bbox, int p) {
    const VolumeLattice k_lat(key_volume, p);
    const Int3 q_box{out_dims.x - p + 1, out_dims.y - p + 1, out_dims.z - p + 1};
    if (std::int64_t(result.assignment.size()) != q_box.volume())
        throw UsageError("assignment does not cover the output lattice");
    const int half = p / 2;
    const int channels = key_volume.channels;

    FeatureGrid out = make_feature_grid(out_dims, out_bbox, channels);
    parallel_chunks(out.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        std::vector<double> acc(std::size_t(channels), 0.0);
        for (std::size_t v = b; v < e; ++v) {
            const Int3 vi = delinearize(out_dims, v);
            Int3 lo, hi;  // covering patch centers
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::max(half, vi[a] - half);
                hi[a] = std::min(out_dims[a] - half - 1, vi[a] + half);
            }
            for (int c = 0; c < channels; ++c) acc[c] = 0.0;
            int count = 0;
            for (int cz = lo.z; cz <= hi.z; ++cz)
                for (int cy = lo.y; cy <= hi.y; ++cy)
                    for (int cx = lo.x; cx <= hi.x; ++cx) {
                        const std::size_t qi =
                            linear_index(q_box, cx - half, cy - half, cz - half);
                        const Int3 k_off =
                            delinearize(k_lat.box, std::size_t(result.assignment[qi]));
                        // voxel at the same in-patch position of the assigned key patch
                        const Int3 kv{k_off.x + half + (vi.x - cx), k_off.y + half + (vi.y - cy),
                                      k_off.z + half + (vi.z - cz)};
                        const std::size_t ki = linear_index(key_volume.dims, kv);
                        for (int c = 0; c < channels; ++c)
                            acc[c] += double(key_volume.plane(c)[ki]);
                        ++count;
                    }
            for (int c = 0; c < channels; ++c) out.plane(c)[v] = float(acc[c] / count);
        }
    });
    return out;
}

MappingField finalize_coordinates(const NnfResult& result, const FeatureGrid& key_volume,
                                  Int3 out_dims, const BBox& out_bbox, int p) {
    const VolumeLattice k_lat(key_volume, p);
    const Int3 q_box{out_dims.x - p + 1, out_dims.y - p + 1, out_dims.z - p + 1};
    if (std::int64_t(result.assignment.size()) != q_box.volume())
        throw UsageError("assignment does not cover the output lattice");
    const int half = p / 2;
    const Vec3 key_voxel = voxel_size(key_volume.dims, key_volume.bbox);

    MappingField field = make_mapping_field(out_dims, out_bbox, key_volume.bbox);
    parallel_chunks(field.voxel_count(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t v = b; v < e; ++v) {
            const Int3 vi = delinearize(out_dims, v);
            Int3 c;  // nearest patch center
            for (int a = 0; a < 3; ++a) c[a] = clamp(vi[a], half, out_dims[a] - half - 1);
            const std::size_t qi = linear_index(q_box, c.x - half, c.y - half, c.z - half);
            const Int3 k_off = delinearize(k_lat.box, std::size_t(result.assignment[qi]));
            const Vec3 k_center = voxel_center(key_volume.dims, key_volume.bbox,
                                               {k_off.x + half, k_off.y + half, k_off.z + half});
            const Vec3 coord{k_center.x + (vi.x - c.x) * key_voxel.x,
                             k_center.y + (vi.y - c.y) * key_voxel.y,
                             k_center.z + (vi.z - c.z) * key_voxel.z};
            field.set_coord(v, key_volume.bbox.clamp_point(coord));
        }
    });
    return field;
}

std::vector<std::int64_t> assignment_from_mapping(const MappingField& field, Int3 key_dims,
                                                  const BBox& key_bbox, Int3 query_dims, int p) {
    if (!(field.dims == query_dims))
        throw UsageError("mapping field dims do not match the query lattice");
    const Int3 q_box{query_dims.x - p + 1, query_dims.y - p + 1, query_dims.z - p + 1};
    const Int3 k_box{key_dims.x - p + 1, key_dims.y - p + 1, key_dims.z - p + 1};
    const int half = p / 2;
    std::vector<std::int64_t> assignment(std::size_t(q_box.volume()));
    parallel_chunks(assignment.size(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Int3 off = delinearize(q_box, i);
            const Vec3 x = voxel_center(query_dims, field.bbox,
                                        {off.x + half, off.y + half, off.z + half});
            const Int3 kv = nearest_voxel(key_dims, key_bbox, map_query(field, x));
            const Int3 k_off = clamp_to_box({kv.x - half, kv.y - half, kv.z - half}, k_box);
            assignment[i] = std::int64_t(linear_index(k_box, k_off));
        }
    });
    return assignment;
}

MappingField nnf_scale_pass(const FeatureGrid& query_init, const FeatureGrid& key_volume,
                            const SynthesisConfig& config, int scale_index, std::uint64_t seed,
                            const std::vector<std::int64_t>* init_assignment) {
    config.validate();
    const bool exact = scale_index < config.exact_scales;
    const int iterations = exact ? config.T_e : config.T_a;
    const int p = config.p;

    FeatureGrid volume = query_init;
    std::vector<std::int64_t> prev;
    if (init_assignment) prev = *init_assignment;

    PatchSet key_set;
    if (exact) {
        const auto lattice = [p](Int3 d) {
            return Int3{d.x - p + 1, d.y - p + 1, d.z - p + 1}.volume();
        };
        require_exact_budget(lattice(query_init.dims), lattice(key_volume.dims),
                             config.exact_budget);
        key_set = extract_patches(key_volume, p);
    }

    NnfResult result;
    for (int iter = 0; iter < iterations; ++iter) {
        if (exact) {
            const PatchSet query_set = extract_patches(volume, p);
            result = exact_nnf(query_set, key_set, config.w_a, config.alpha, config.exact_budget);
        } else {
            result = approximate_nnf(volume, key_volume, p, config.w_a,
                                     prev.empty() ? nullptr : &prev,
                                     mix_seed(seed, std::uint64_t(scale_index), std::uint64_t(iter)),
                                     config.pm_sweeps);
        }
        prev = result.assignment;
        if (iter + 1 < iterations)
            volume = blend_values(result, key_volume, volume.dims, volume.bbox, p);
    }
    result.kind = NnfResult::Kind::kFinalCoordinates;
    return finalize_coordinates(result, key_volume, volume.dims, volume.bbox, p);
}

}  // namespace voxsyn
