// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "synth/synth.h"

#include <chrono>
#include <cmath>
#include <sstream>

#include "core/rng.h"

namespace voxsyn {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (tag + 1));
    return splitmix64(s);
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string RunLog::to_text() const {
    std::ostringstream os;
    os << "scale\tsynth_dims\texemplar_dims\titerations\tmode\tseconds\n";
    for (const auto& s : scales) {
        os << s.scale << '\t' << s.synth_dims.x << 'x' << s.synth_dims.y << 'x' << s.synth_dims.z
           << '\t' << s.exemplar_dims.x << 'x' << s.exemplar_dims.y << 'x' << s.exemplar_dims.z
           << '\t' << s.iterations << '\t' << (s.exact ? "exact" : "approximate") << '\t'
           << s.seconds << '\n';
    }
    os << "total_seconds\t" << total_seconds << '\n';
    return os.str();
}

Vec3 noise_offset(std::uint64_t seed, std::size_t voxel_index, const BBox& exemplar_bbox,
                  double sigma) {
    Rng rng(seed, 0x0f5e, voxel_index);
    return {sigma * exemplar_bbox.half.x * rng.normal(), sigma * exemplar_bbox.half.y * rng.normal(),
            sigma * exemplar_bbox.half.z * rng.normal()};
}

MappingField init_coarse(Int3 dims, const BBox& synth_bbox, const BBox& exemplar_bbox, double sigma,
                         std::uint64_t seed) {
    if (sigma < 0.0) throw UsageError("sigma must be non-negative");
    MappingField field = identity_mapping(dims, synth_bbox, exemplar_bbox);
    if (sigma == 0.0) return field;
    for (std::size_t i = 0; i < field.voxel_count(); ++i) {
        const Vec3 c = field.coord_at(i) + noise_offset(seed, i, exemplar_bbox, sigma);
        field.set_coord(i, exemplar_bbox.clamp_point(c));
    }
    return field;
}

std::vector<Int3> synthesis_dims(const SynthesisConfig& config, Int3 target_dims) {
    config.validate();
    const int finest = config.max_dim_schedule.back();
    std::vector<Int3> dims;
    dims.reserve(config.max_dim_schedule.size());
    for (const int m : config.max_dim_schedule) {
        Int3 d;
        for (int a = 0; a < 3; ++a) {
            const double scaled = double(target_dims[a]) * double(m) / double(finest);
            d[a] = std::max(1, int(std::floor(scaled + 0.5)));
        }
        dims.push_back(d);
    }
    return dims;
}

MappingField generate_with_init(const ExemplarPyramid& pyramid, const SynthesisConfig& config,
                                std::uint64_t seed, const InitSpec& init, Int3 target_dims,
                                RunLog* log) {
    config.validate();
    if (pyramid.count() != config.scale_count())
        throw UsageError("pyramid has " + std::to_string(pyramid.count()) + " levels but the schedule has " +
                         std::to_string(config.scale_count()));

    const Int3 finest_exemplar = pyramid.levels.back().grid.dims;
    const bool native = target_dims == finest_exemplar;

    // fixed synthesis box: the exemplar box, stretched per axis when
    // retargeting so voxel size still matches the exemplar at each scale
    BBox synth_bbox = pyramid.bbox();
    std::vector<Int3> dims;
    if (native) {
        dims.reserve(pyramid.levels.size());
        for (const auto& level : pyramid.levels) dims.push_back(level.grid.dims);
    } else {
        dims = synthesis_dims(config, target_dims);
        for (int a = 0; a < 3; ++a)
            synth_bbox.half[a] = pyramid.bbox().half[a] * double(target_dims[a]) /
                                 double(finest_exemplar[a]);
    }

    const auto run_start = std::chrono::steady_clock::now();

    MappingField field;
    switch (init.mode) {
        case InitSpec::Mode::kNoise:
            field = init_coarse(dims[0], synth_bbox, pyramid.bbox(), config.sigma, seed);
            break;
        case InitSpec::Mode::kIdentity:
            field = identity_mapping(dims[0], synth_bbox, pyramid.bbox());
            break;
        case InitSpec::Mode::kMapping:
            if (!(init.mapping.dims == dims[0]))
                throw UsageError("proxy mapping dims do not match the coarse synthesis dims");
            field = init.mapping;
            field.bbox = synth_bbox;
            clamp_coords(field);
            break;
        case InitSpec::Mode::kFeatures:
            if (!(init.features.dims == dims[0]))
                throw UsageError("replacement features do not match the coarse synthesis dims");
            field = identity_mapping(dims[0], synth_bbox, pyramid.bbox());
            break;
    }

    for (int scale = 0; scale < pyramid.count(); ++scale) {
        const auto scale_start = std::chrono::steady_clock::now();
        const PyramidLevel& level = pyramid.levels[std::size_t(scale)];

        if (scale > 0) field = upsample_mapping(field, dims[std::size_t(scale)]);

        FeatureGrid queries;
        if (scale == 0 && init.mode == InitSpec::Mode::kFeatures) {
            queries = init.features;
            queries.bbox = synth_bbox;
        } else {
            queries = resolve_features(field, level.transformed);
        }

        std::vector<std::int64_t> init_assignment;
        const bool approximate = scale >= config.exact_scales;
        if (approximate)
            init_assignment = assignment_from_mapping(field, level.transformed.dims,
                                                      level.transformed.bbox, queries.dims, config.p);

        field = nnf_scale_pass(queries, level.transformed, config, scale, mix(seed, 0xcafe),
                               approximate ? &init_assignment : nullptr);

        if (log) {
            RunLog::ScaleEntry entry;
            entry.scale = scale;
            entry.synth_dims = dims[std::size_t(scale)];
            entry.exemplar_dims = level.grid.dims;
            entry.iterations = approximate ? config.T_a : config.T_e;
            entry.exact = !approximate;
            entry.seconds = elapsed_seconds(scale_start);
            log->scales.push_back(entry);
        }
    }

    if (log) log->total_seconds = elapsed_seconds(run_start);
    return field;
}

MappingField generate(const ExemplarPyramid& pyramid, const SynthesisConfig& config,
                      std::uint64_t seed, RunLog* log) {
    InitSpec init;
    init.mode = InitSpec::Mode::kNoise;
    return generate_with_init(pyramid, config, seed, init, pyramid.levels.back().grid.dims, log);
}

MappingField retarget(const ExemplarPyramid& pyramid, Int3 target_dims,
                      const SynthesisConfig& config, RunLog* log) {
    if (target_dims.x < 1 || target_dims.y < 1 || target_dims.z < 1)
        throw UsageError("target dims must be positive");
    InitSpec init;
    init.mode = InitSpec::Mode::kIdentity;
    return generate_with_init(pyramid, config, config.seed, init, target_dims, log);
}

TransformedGrid analogy_features_from_grid(const ExemplarPyramid& pyramid_a, const VoxelGrid& b,
                                           const SynthesisConfig& config) {
    const Int3 coarse = pyramid_a.levels.front().grid.dims;
    const VoxelGrid resampled = [&] {
        VoxelGrid r = resample_grid(b, coarse);
        r.bbox = pyramid_a.bbox();  // share A's box so patch coordinates line up
        return r;
    }();
    // project into A's matching space: same truncation, same PCA
    return transform_exemplar(resampled, config.t_multiplier, pyramid_a.levels.front().pca);
}

MappingField structural_analogy(const ExemplarPyramid& pyramid_a, const TransformedGrid& features_b,
                                const SynthesisConfig& config, RunLog* log) {
    InitSpec init;
    init.mode = InitSpec::Mode::kFeatures;
    init.features = features_b;
    return generate_with_init(pyramid_a, config, config.seed, init,
                              pyramid_a.levels.back().grid.dims, log);
}

MappingField edit_synthesis(const ExemplarPyramid& pyramid, const MappingField& proxy,
                            const SynthesisConfig& config, RunLog* log) {
    InitSpec init;
    init.mode = InitSpec::Mode::kMapping;
    init.mapping = proxy;
    return generate_with_init(pyramid, config, config.seed, init, pyramid.levels.back().grid.dims,
                              log);
}

VoxelGrid redecorate(const MappingField& field, const VoxelGrid& other_exemplar) {
    if (!(other_exemplar.bbox == field.exemplar_bbox))
        throw UsageError("re-decoration exemplar box differs from the mapping's exemplar box");
    return resolve_features(field, other_exemplar);
}

namespace {

SynthesisConfig tail_config(SynthesisConfig base, std::size_t scales, int exact_scales) {
    if (base.max_dim_schedule.size() > scales)
        base.max_dim_schedule.erase(base.max_dim_schedule.begin(),
                                    base.max_dim_schedule.end() - std::ptrdiff_t(scales));
    base.exact_scales = exact_scales;
    base.sigma = 0.0;  // applications start from user-specified structure
    return base;
}

}  // namespace

SynthesisConfig edit_config(SynthesisConfig base) { return tail_config(std::move(base), 6, 3); }

SynthesisConfig analogy_config(SynthesisConfig base) { return tail_config(std::move(base), 4, 1); }

}  // namespace voxsyn
