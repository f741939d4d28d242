// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

// voxsyn: exemplar-based voxel scene synthesis, rendering and evaluation.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "core/io.h"
#include "xform/mesh.h"
#include "core/parallel.h"
#include "metrics/metrics.h"
#include "pyramid/procedural.h"
#include "render/render.h"
#include "synth/synth.h"

namespace vs = voxsyn;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

vs::Int3 parse_dims(const std::string& text) {
    vs::Int3 d;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &d.x, &d.y, &d.z) != 3)
        throw vs::UsageError("expected dims as X,Y,Z, got '" + text + "'");
    return d;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        const std::string tok = text.substr(pos, next - pos);
        const std::size_t dots = tok.find("..");
        if (dots != std::string::npos) {
            const std::uint64_t lo = std::stoull(tok.substr(0, dots));
            const std::uint64_t hi = std::stoull(tok.substr(dots + 2));
            if (hi < lo) throw vs::UsageError("bad seed range '" + tok + "'");
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else if (!tok.empty()) {
            seeds.push_back(std::stoull(tok));
        }
        pos = next + 1;
    }
    if (seeds.empty()) throw vs::UsageError("no seeds given");
    return seeds;
}

json config_to_json(const vs::SynthesisConfig& c) {
    return json{{"r", c.r},
                {"p", c.p},
                {"w_a", c.w_a},
                {"alpha", c.alpha},
                {"sigma", c.sigma},
                {"t_multiplier", c.t_multiplier},
                {"T_e", c.T_e},
                {"T_a", c.T_a},
                {"exact_scales", c.exact_scales},
                {"pm_sweeps", c.pm_sweeps},
                {"max_dim_schedule", c.max_dim_schedule},
                {"seed", c.seed},
                {"exact_budget", c.exact_budget}};
}

void config_from_json(const json& j, vs::SynthesisConfig& c) {
    c.r = j.value("r", c.r);
    c.p = j.value("p", c.p);
    c.w_a = j.value("w_a", c.w_a);
    c.alpha = j.value("alpha", c.alpha);
    c.sigma = j.value("sigma", c.sigma);
    c.t_multiplier = j.value("t_multiplier", c.t_multiplier);
    c.T_e = j.value("T_e", c.T_e);
    c.T_a = j.value("T_a", c.T_a);
    c.exact_scales = j.value("exact_scales", c.exact_scales);
    c.pm_sweeps = j.value("pm_sweeps", c.pm_sweeps);
    c.max_dim_schedule = j.value("max_dim_schedule", c.max_dim_schedule);
    c.seed = j.value("seed", c.seed);
    c.exact_budget = j.value("exact_budget", c.exact_budget);
}

// Shared synthesis options: config file first, then explicit flags on top.
struct SynthOpts {
    std::string exemplar_path;
    std::string pyramid_dir;
    std::string procedural_kind;
    std::string proc_dims = "121,121,47";
    std::uint64_t proc_seed = 1;
    std::string config_path;
    std::string schedule_text;
    std::string schedule_r_text;
    vs::SynthesisConfig config;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--exemplar", exemplar_path, "exemplar VXG file");
        cmd->add_option("--pyramid-dir", pyramid_dir, "directory with level_0.vxg .. level_N.vxg (+ optional high.vxg)");
        cmd->add_option("--procedural", procedural_kind, "procedural exemplar kind (terrain, arches, blobs)");
        cmd->add_option("--proc-dims", proc_dims, "procedural exemplar dims X,Y,Z");
        cmd->add_option("--proc-seed", proc_seed, "procedural exemplar seed");
        cmd->add_option("--config", config_path, "JSON config file; flags override its values");
        cmd->add_option("--max-dim-schedule", schedule_text, "comma-separated per-scale max dims");
        cmd->add_option("--schedule-from-r", schedule_r_text,
                        "derive the schedule from r as COARSEST,FINEST (ablation sweeps)");
        cmd->add_option("--sigma", config.sigma, "coarse-init noise std, in half-extent units");
        cmd->add_option("--wa", config.w_a, "appearance weight in the patch distance");
        cmd->add_option("--alpha", config.alpha, "completeness trade-off");
        cmd->add_option("--patch", config.p, "patch edge p");
        cmd->add_option("--t-multiplier", config.t_multiplier, "SDF truncation in voxel sizes");
        cmd->add_option("--r", config.r, "pyramid scale factor");
        cmd->add_option("--te", config.T_e, "iterations per exact scale");
        cmd->add_option("--ta", config.T_a, "iterations per approximate scale");
        cmd->add_option("--exact-scales", config.exact_scales, "number of coarse scales using exact NNF");
        cmd->add_option("--pm-sweeps", config.pm_sweeps, "PatchMatch sweeps per approximate match");
    }

    // flag values already sit in `config`; re-apply file underneath them
    void finalize(CLI::App* cmd) {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw vs::IoError("cannot open config '" + config_path + "'");
            json j;
            in >> j;
            vs::SynthesisConfig from_file;
            config_from_json(j, from_file);
            const auto keep = [&](const char* flag) { return cmd->count(flag) > 0; };
            if (!keep("--sigma")) config.sigma = from_file.sigma;
            if (!keep("--wa")) config.w_a = from_file.w_a;
            if (!keep("--alpha")) config.alpha = from_file.alpha;
            if (!keep("--patch")) config.p = from_file.p;
            if (!keep("--t-multiplier")) config.t_multiplier = from_file.t_multiplier;
            if (!keep("--r")) config.r = from_file.r;
            if (!keep("--te")) config.T_e = from_file.T_e;
            if (!keep("--ta")) config.T_a = from_file.T_a;
            if (!keep("--exact-scales")) config.exact_scales = from_file.exact_scales;
            if (!keep("--pm-sweeps")) config.pm_sweeps = from_file.pm_sweeps;
            if (!keep("--max-dim-schedule")) config.max_dim_schedule = from_file.max_dim_schedule;
            config.exact_budget = from_file.exact_budget;
        }
        if (!schedule_text.empty()) {
            std::vector<int> schedule;
            std::size_t pos = 0;
            while (pos < schedule_text.size()) {
                std::size_t next = schedule_text.find(',', pos);
                if (next == std::string::npos) next = schedule_text.size();
                schedule.push_back(std::stoi(schedule_text.substr(pos, next - pos)));
                pos = next + 1;
            }
            config.max_dim_schedule = schedule;
        }
        if (!schedule_r_text.empty()) {
            int coarse = 0, fine = 0;
            if (std::sscanf(schedule_r_text.c_str(), "%d,%d", &coarse, &fine) != 2)
                throw vs::UsageError("--schedule-from-r expects COARSEST,FINEST");
            config.max_dim_schedule = vs::schedule_from_r(coarse, fine, config.r);
        }
        int sources = 0;
        sources += exemplar_path.empty() ? 0 : 1;
        sources += pyramid_dir.empty() ? 0 : 1;
        sources += procedural_kind.empty() ? 0 : 1;
        if (sources != 1)
            throw vs::UsageError("specify exactly one exemplar source: --exemplar, --pyramid-dir or --procedural");
    }

    vs::ExemplarPyramid load_pyramid() const {
        if (!pyramid_dir.empty()) {
            std::vector<vs::VoxelGrid> levels;
            for (int k = 0;; ++k) {
                const fs::path p = fs::path(pyramid_dir) / ("level_" + std::to_string(k) + ".vxg");
                if (!fs::exists(p)) break;
                levels.push_back(vs::read_vxg(p.string()));
            }
            if (int(levels.size()) != config.scale_count())
                throw vs::UsageError("pyramid dir holds " + std::to_string(levels.size()) +
                                     " levels but the schedule expects " +
                                     std::to_string(config.scale_count()));
            std::optional<vs::VoxelGrid> high;
            const fs::path hp = fs::path(pyramid_dir) / "high.vxg";
            if (fs::exists(hp)) high = vs::read_vxg(hp.string());
            return vs::build_pyramid_from_grids(std::move(levels), std::move(high), config);
        }
        return vs::build_pyramid(load_exemplar(), config);
    }

    vs::VoxelGrid load_exemplar() const {
        if (!procedural_kind.empty())
            return vs::procedural_exemplar(vs::parse_exemplar_kind(procedural_kind),
                                           parse_dims(proc_dims), proc_seed);
        return vs::read_vxg(exemplar_path);
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw vs::IoError("cannot create directory '" + dir + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw vs::IoError("cannot open '" + path + "'");
    out << text;
}

void write_run_log(const std::string& path, const vs::SynthesisConfig& config, std::uint64_t seed,
                   const vs::RunLog& log) {
    json j = config_to_json(config);
    j["seed"] = seed;
    write_text(path, "resolved config: " + j.dump() + "\n" + log.to_text());
}

std::vector<vs::Camera> parse_cameras(const std::string& spec, int res, double focal) {
    if (spec.rfind("hemisphere:", 0) == 0) {
        int count = 50;
        double radius = 2.5;
        std::sscanf(spec.c_str(), "hemisphere:%d:%lf", &count, &radius);
        return vs::sample_cameras(count, radius, focal, res, res);
    }
    std::ifstream in(spec);
    if (!in) throw vs::IoError("cannot open camera list '" + spec + "'");
    std::vector<vs::Camera> cams;
    double px, py, pz, lx, ly, lz, fov;
    while (in >> px >> py >> pz >> lx >> ly >> lz >> fov) {
        vs::Camera cam;
        cam.position = {px, py, pz};
        cam.look_at = {lx, ly, lz};
        cam.focal = (res * 0.5) / std::tan(fov * 0.5 * 3.14159265358979323846 / 180.0);
        cam.width = cam.height = res;
        cams.push_back(cam);
    }
    if (cams.empty()) throw vs::UsageError("camera list '" + spec + "' is empty");
    return cams;
}

void write_renders(const std::string& dir, const std::string& prefix,
                   const std::vector<vs::Image>& images) {
    for (std::size_t i = 0; i < images.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s%03zu.ppm", prefix.c_str(), i);
        vs::write_ppm((fs::path(dir) / name).string(), images[i].width, images[i].height,
                      images[i].rgb);
    }
}

// ---- subcommands ----------------------------------------------------------

int cmd_make_exemplar(const std::string& kind, const std::string& dims_text, std::uint64_t seed,
                      const std::string& out, const std::string& high_dims_text,
                      const std::string& high_out) {
    const vs::VoxelGrid grid =
        vs::procedural_exemplar(vs::parse_exemplar_kind(kind), parse_dims(dims_text), seed);
    vs::write_vxg(out, grid);
    std::printf("wrote %s (%dx%dx%d)\n", out.c_str(), grid.dims.x, grid.dims.y, grid.dims.z);
    if (!high_dims_text.empty()) {
        // the generators are functions of world position, so the same seed
        // yields the same scene at the finer readout resolution
        const vs::VoxelGrid high =
            vs::procedural_exemplar(vs::parse_exemplar_kind(kind), parse_dims(high_dims_text), seed);
        const std::string path = high_out.empty() ? out + ".high.vxg" : high_out;
        vs::write_vxg(path, high);
        std::printf("wrote %s (%dx%dx%d)\n", path.c_str(), high.dims.x, high.dims.y, high.dims.z);
    }
    return 0;
}

int cmd_build_pyramid(const SynthOpts& opts, const std::string& out_dir) {
    ensure_dir(out_dir);
    const vs::ExemplarPyramid pyramid = opts.load_pyramid();
    for (int k = 0; k < pyramid.count(); ++k)
        vs::write_vxg((fs::path(out_dir) / ("level_" + std::to_string(k) + ".vxg")).string(),
                      pyramid.levels[std::size_t(k)].grid);
    vs::write_vxg((fs::path(out_dir) / "high.vxg").string(), pyramid.high_res);
    std::printf("wrote %d levels + high.vxg to %s\n", pyramid.count(), out_dir.c_str());
    return 0;
}

struct GenerateJob {
    enum class Kind { kGenerate, kRetarget, kAnalogy, kEdit } kind = Kind::kGenerate;
    vs::Int3 target_dims;
    std::string proxy_path;
    std::string exemplar_b_path;
};

int run_synthesis(SynthOpts& opts, const GenerateJob& job, const std::string& seeds_text,
                  const std::string& out_dir, int render_views, int render_res, bool write_grid) {
    ensure_dir(out_dir);
    vs::SynthesisConfig config = opts.config;
    if (job.kind == GenerateJob::Kind::kEdit) config = vs::edit_config(config);
    if (job.kind == GenerateJob::Kind::kAnalogy) config = vs::analogy_config(config);
    opts.config = config;

    const vs::ExemplarPyramid pyramid = opts.load_pyramid();
    const std::vector<std::uint64_t> seeds =
        job.kind == GenerateJob::Kind::kGenerate ? parse_seeds(seeds_text)
                                                 : std::vector<std::uint64_t>{config.seed};

    // analogy/edit inputs prepared once, shared read-only
    vs::TransformedGrid features_b;
    vs::MappingField proxy;
    if (job.kind == GenerateJob::Kind::kAnalogy)
        features_b = vs::analogy_features_from_grid(pyramid, vs::read_vxg(job.exemplar_b_path), config);
    if (job.kind == GenerateJob::Kind::kEdit) proxy = vs::read_vxm(job.proxy_path);

    // seeds fan out across workers; nested loops inside a worker run inline
    vs::parallel_chunks(seeds.size(), [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::uint64_t seed = seeds[i];
            vs::RunLog log;
            vs::MappingField field;
            switch (job.kind) {
                case GenerateJob::Kind::kGenerate:
                    field = vs::generate(pyramid, config, seed, &log);
                    break;
                case GenerateJob::Kind::kRetarget:
                    field = vs::retarget(pyramid, job.target_dims, config, &log);
                    break;
                case GenerateJob::Kind::kAnalogy:
                    field = vs::structural_analogy(pyramid, features_b, config, &log);
                    break;
                case GenerateJob::Kind::kEdit:
                    field = vs::edit_synthesis(pyramid, proxy, config, &log);
                    break;
            }
            const std::string stem = "map_seed" + std::to_string(seed);
            vs::write_vxm((fs::path(out_dir) / (stem + ".vxm")).string(), field);
            write_run_log((fs::path(out_dir) / ("run_seed" + std::to_string(seed) + ".log")).string(),
                          config, seed, log);
            if (write_grid)
                vs::write_vxg((fs::path(out_dir) / (stem + ".vxg")).string(),
                              vs::resolve_features(field, pyramid.high_res));
            if (render_views > 0) {
                const auto cams = vs::sample_cameras(render_views, 2.5, 512.0, render_res, render_res);
                std::vector<vs::Image> images;
                images.reserve(cams.size());
                for (const auto& cam : cams)
                    images.push_back(vs::render(field, pyramid.high_res, cam));
                write_renders(out_dir, stem + "_view", images);
            }
        }
    });
    std::printf("wrote %zu mapping field(s) to %s\n", seeds.size(), out_dir.c_str());
    return 0;
}

int cmd_redecorate(const std::string& mapping_path, const std::string& exemplar_path,
                   const std::string& out) {
    const vs::MappingField field = vs::read_vxm(mapping_path);
    const vs::VoxelGrid other = vs::read_vxg(exemplar_path);
    vs::write_vxg(out, vs::redecorate(field, other));
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int cmd_render(const std::string& grid_path, const std::string& mapping_path,
               const std::string& exemplar_path, const std::string& cameras, int res, double focal,
               double step, const std::string& out_dir) {
    ensure_dir(out_dir);
    const auto cams = parse_cameras(cameras, res, focal);
    std::vector<vs::Image> images;
    images.reserve(cams.size());
    if (!grid_path.empty()) {
        const vs::VoxelGrid grid = vs::read_vxg(grid_path);
        for (const auto& cam : cams) images.push_back(vs::render(grid, cam, step));
    } else {
        if (mapping_path.empty() || exemplar_path.empty())
            throw vs::UsageError("render needs --grid, or --mapping together with --exemplar");
        const vs::MappingField field = vs::read_vxm(mapping_path);
        const vs::VoxelGrid exemplar = vs::read_vxg(exemplar_path);
        for (const auto& cam : cams) images.push_back(vs::render(field, exemplar, cam, step));
    }
    write_renders(out_dir, "view", images);
    std::printf("wrote %zu image(s) to %s\n", images.size(), out_dir.c_str());
    return 0;
}

int cmd_evaluate(const std::string& exemplar_path, const std::vector<std::string>& mapping_paths,
                 int views, double radius, int res, int points, int div_points, int patch_centers,
                 int patch_k, int metric_max_dim, bool no_diversity, const std::string& mesh_dir,
                 const std::string& out) {
    if (mapping_paths.empty()) throw vs::UsageError("evaluate needs at least one --mapping");
    const bool diversity = !no_diversity;
    if (diversity && mapping_paths.size() < 2)
        throw vs::UsageError("diversity metrics need at least two scenes (or pass --no-diversity)");

    const vs::VoxelGrid exemplar = vs::read_vxg(exemplar_path);
    std::vector<vs::MappingField> fields;
    fields.reserve(mapping_paths.size());
    for (const auto& p : mapping_paths) fields.push_back(vs::read_vxm(p));

    // geometry: voxelize at the metric resolution, extract surfaces, sample
    const vs::Int3 ex_metric_dims = vs::dims_for_max_dim(metric_max_dim, exemplar.dims);
    const vs::VoxelGrid ex_metric = vs::resample_grid(exemplar, ex_metric_dims);
    const vs::Mesh ex_mesh = vs::marching_cubes(ex_metric, vs::kDensityThreshold);
    if (!mesh_dir.empty()) {
        ensure_dir(mesh_dir);
        vs::write_obj((fs::path(mesh_dir) / "exemplar.obj").string(), ex_mesh);
    }
    const vs::PointCloud ex_pc = vs::sample_surface(ex_mesh, points, 11);
    const auto ex_patches = vs::extract_patches_pc(ex_pc, patch_centers, patch_k, 12);

    std::vector<double> gqua(fields.size());
    std::vector<vs::PointCloud> div_clouds(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        vs::Int3 metric_dims = vs::dims_for_max_dim(metric_max_dim, fields[i].dims);
        for (int a = 0; a < 3; ++a) metric_dims[a] = std::max(metric_dims[a], fields[i].dims[a]);
        const vs::MappingField fine = vs::upsample_mapping(fields[i], metric_dims);
        const vs::VoxelGrid scene = vs::resolve_features(fine, exemplar);
        const vs::Mesh mesh = vs::marching_cubes(scene, vs::kDensityThreshold);
        if (!mesh_dir.empty())
            vs::write_obj((fs::path(mesh_dir) / ("scene_" + std::to_string(i) + ".obj")).string(),
                          mesh);
        const vs::PointCloud pc = vs::sample_surface(mesh, points, 11);
        gqua[i] = vs::mmd_quality(vs::extract_patches_pc(pc, patch_centers, patch_k, 12), ex_patches);
        if (diversity)
            div_clouds[i] = vs::sample_surface(mesh, div_points, 13);
    }

    // visual diversity over shared poses
    std::vector<double> per_view_vdiv;
    double vdiv = 0.0;
    if (diversity) {
        const auto cams = vs::sample_cameras(views, radius, 512.0, res, res);
        std::vector<vs::Image> ex_views;
        ex_views.reserve(cams.size());
        for (const auto& cam : cams) ex_views.push_back(vs::render(exemplar, cam));
        std::vector<std::vector<vs::Image>> stacks(cams.size());
        for (const auto& field : fields)
            for (std::size_t v = 0; v < cams.size(); ++v)
                stacks[v].push_back(vs::render(field, exemplar, cams[v]));
        for (std::size_t v = 0; v < cams.size(); ++v) {
            per_view_vdiv.push_back(
                vs::visual_diversity({stacks[v]}, {ex_views[v]}));
        }
        vdiv = vs::visual_diversity(stacks, ex_views);
    }

    std::string report = "# voxsyn evaluation report\n";
    double gqua_mean = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        double contribution = 0.0;
        if (diversity)
            for (std::size_t j = 0; j < fields.size(); ++j)
                if (j != i) contribution += vs::chamfer(div_clouds[i], div_clouds[j]);
        report += "scene\t" + mapping_paths[i] + "\tG-Qua\t" + std::to_string(gqua[i]) +
                  "\tG-Div-contribution\t" + (diversity ? std::to_string(contribution) : "n/a") + "\n";
        gqua_mean += gqua[i] / double(fields.size());
    }
    for (std::size_t v = 0; v < per_view_vdiv.size(); ++v)
        report += "view\t" + std::to_string(v) + "\tV-Div\t" + std::to_string(per_view_vdiv[v]) + "\n";
    report += "aggregate\tG-Qua-mean\t" + std::to_string(gqua_mean) + "\n";
    if (diversity) {
        report += "aggregate\tG-Div-TMD\t" + std::to_string(vs::tmd_diversity(div_clouds)) + "\n";
        report += "aggregate\tV-Div\t" + std::to_string(vdiv) + "\n";
    }
    report += "aggregate\tV-Qua\tunavailable (needs a pretrained SIFID network)\n";

    if (out.empty()) {
        std::fputs(report.c_str(), stdout);
    } else {
        write_text(out, report);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patch-based voxel scene synthesis from a single exemplar"};
    app.require_subcommand(1);

    // make-exemplar
    auto* mk = app.add_subcommand("make-exemplar", "write a procedural exemplar VXG");
    std::string mk_kind = "terrain", mk_dims = "121,121,47", mk_out = "exemplar.vxg";
    std::string mk_high_dims, mk_high_out;
    std::uint64_t mk_seed = 1;
    mk->add_option("--kind", mk_kind, "terrain, arches or blobs");
    mk->add_option("--dims", mk_dims, "grid dims X,Y,Z");
    mk->add_option("--seed", mk_seed, "generator seed");
    mk->add_option("--out", mk_out, "output path");
    mk->add_option("--high-dims", mk_high_dims, "also write a high-res version at these dims");
    mk->add_option("--high-out", mk_high_out, "high-res output path (default <out>.high.vxg)");

    // build-pyramid
    auto* bp = app.add_subcommand("build-pyramid", "write per-level VXG files");
    SynthOpts bp_opts;
    bp_opts.add_flags(bp);
    std::string bp_out = "pyramid";
    bp->add_option("--out-dir", bp_out, "output directory");

    // generate / retarget / analogy / edit share the synthesis options
    auto* gen = app.add_subcommand("generate", "random scene generation");
    SynthOpts gen_opts;
    gen_opts.add_flags(gen);
    std::string gen_seeds = "1", gen_out = "out";
    int gen_views = 0, gen_res = 256;
    bool gen_grid = false;
    gen->add_option("--seeds", gen_seeds, "seed list: 1,2,5 or 1..10");
    gen->add_option("--out-dir", gen_out, "output directory");
    gen->add_option("--render-views", gen_views, "hemisphere renders per seed (0 = none)");
    gen->add_option("--render-res", gen_res, "render resolution");
    gen->add_flag("--write-grid", gen_grid, "also write the resolved voxel grid");

    auto* rt = app.add_subcommand("retarget", "resize a scene, keeping exemplar patches");
    SynthOpts rt_opts;
    rt_opts.add_flags(rt);
    std::string rt_dims, rt_out = "out";
    int rt_views = 0, rt_res = 256;
    bool rt_grid = false;
    rt->add_option("--target-dims", rt_dims, "finest-scale output dims X,Y,Z")->required();
    rt->add_option("--out-dir", rt_out, "output directory");
    rt->add_option("--render-views", rt_views, "hemisphere renders (0 = none)");
    rt->add_option("--render-res", rt_res, "render resolution");
    rt->add_flag("--write-grid", rt_grid, "also write the resolved voxel grid");

    auto* an = app.add_subcommand("analogy", "structure of B, patches of A");
    SynthOpts an_opts;
    an_opts.add_flags(an);
    std::string an_b, an_out = "out";
    int an_views = 0, an_res = 256;
    bool an_grid = false;
    an->add_option("--exemplar-b", an_b, "structure exemplar VXG")->required();
    an->add_option("--out-dir", an_out, "output directory");
    an->add_option("--render-views", an_views, "hemisphere renders (0 = none)");
    an->add_option("--render-res", an_res, "render resolution");
    an->add_flag("--write-grid", an_grid, "also write the resolved voxel grid");

    auto* ed = app.add_subcommand("edit", "synthesize from an edited proxy mapping");
    SynthOpts ed_opts;
    ed_opts.add_flags(ed);
    std::string ed_proxy, ed_out = "out";
    int ed_views = 0, ed_res = 256;
    bool ed_grid = false;
    ed->add_option("--proxy", ed_proxy, "proxy mapping VXM at the edit coarse dims")->required();
    ed->add_option("--out-dir", ed_out, "output directory");
    ed->add_option("--render-views", ed_views, "hemisphere renders (0 = none)");
    ed->add_option("--render-res", ed_res, "render resolution");
    ed->add_flag("--write-grid", ed_grid, "also write the resolved voxel grid");

    // redecorate
    auto* rd = app.add_subcommand("redecorate", "re-read a mapping through another exemplar");
    std::string rd_map, rd_ex, rd_out = "redecorated.vxg";
    rd->add_option("--mapping", rd_map, "mapping VXM")->required();
    rd->add_option("--exemplar", rd_ex, "replacement exemplar VXG")->required();
    rd->add_option("--out", rd_out, "output VXG");

    // render
    auto* rn = app.add_subcommand("render", "volume-render a grid or mapping pair");
    std::string rn_grid, rn_map, rn_ex, rn_cams = "hemisphere:50:2.5", rn_out = "renders";
    int rn_res = 512;
    double rn_focal = 512.0, rn_step = 0.0;
    rn->add_option("--grid", rn_grid, "VXG scene");
    rn->add_option("--mapping", rn_map, "VXM mapping (with --exemplar)");
    rn->add_option("--exemplar", rn_ex, "exemplar VXG for the mapping");
    rn->add_option("--cameras", rn_cams, "hemisphere:K:R or a camera list file");
    rn->add_option("--res", rn_res, "image resolution");
    rn->add_option("--focal", rn_focal, "focal length in pixels");
    rn->add_option("--step", rn_step, "march step (0 = half voxel)");
    rn->add_option("--out-dir", rn_out, "output directory");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "geometry/visual metrics over generated scenes");
    std::string ev_ex, ev_out;
    std::vector<std::string> ev_maps;
    int ev_views = 50, ev_res = 512, ev_points = 102400, ev_div_points = 10240;
    int ev_centers = 1000, ev_k = 1024, ev_metric_dim = 256;
    double ev_radius = 2.5;
    bool ev_nodiv = false;
    std::string ev_mesh_dir;
    ev->add_option("--exemplar", ev_ex, "exemplar VXG")->required();
    ev->add_option("--mappings", ev_maps, "mapping VXM files")->required();
    ev->add_option("--views", ev_views, "camera count");
    ev->add_option("--radius", ev_radius, "camera radius");
    ev->add_option("--res", ev_res, "render resolution");
    ev->add_option("--points", ev_points, "surface samples for quality");
    ev->add_option("--div-points", ev_div_points, "surface samples for diversity");
    ev->add_option("--patch-centers", ev_centers, "point-cloud patch centers");
    ev->add_option("--patch-k", ev_k, "points per point-cloud patch");
    ev->add_option("--metric-max-dim", ev_metric_dim, "voxelization max dim for meshes");
    ev->add_flag("--no-diversity", ev_nodiv, "skip diversity metrics (allows a single scene)");
    ev->add_option("--dump-meshes", ev_mesh_dir, "also write the extracted surfaces as OBJ");
    ev->add_option("--out", ev_out, "report path (default stdout)");

    try {
        app.parse(argc, argv);

        if (*mk) return cmd_make_exemplar(mk_kind, mk_dims, mk_seed, mk_out, mk_high_dims, mk_high_out);
        if (*bp) {
            bp_opts.finalize(bp);
            return cmd_build_pyramid(bp_opts, bp_out);
        }
        if (*gen) {
            gen_opts.finalize(gen);
            GenerateJob job;
            job.kind = GenerateJob::Kind::kGenerate;
            return run_synthesis(gen_opts, job, gen_seeds, gen_out, gen_views, gen_res, gen_grid);
        }
        if (*rt) {
            rt_opts.finalize(rt);
            GenerateJob job;
            job.kind = GenerateJob::Kind::kRetarget;
            job.target_dims = parse_dims(rt_dims);
            return run_synthesis(rt_opts, job, "1", rt_out, rt_views, rt_res, rt_grid);
        }
        if (*an) {
            an_opts.finalize(an);
            GenerateJob job;
            job.kind = GenerateJob::Kind::kAnalogy;
            job.exemplar_b_path = an_b;
            return run_synthesis(an_opts, job, "1", an_out, an_views, an_res, an_grid);
        }
        if (*ed) {
            ed_opts.finalize(ed);
            GenerateJob job;
            job.kind = GenerateJob::Kind::kEdit;
            job.proxy_path = ed_proxy;
            return run_synthesis(ed_opts, job, "1", ed_out, ed_views, ed_res, ed_grid);
        }
        if (*rd) return cmd_redecorate(rd_map, rd_ex, rd_out);
        if (*rn)
            return cmd_render(rn_grid, rn_map, rn_ex, rn_cams, rn_res, rn_focal, rn_step, rn_out);
        if (*ev)
            return cmd_evaluate(ev_ex, ev_maps, ev_views, ev_radius, ev_res, ev_points,
                                ev_div_points, ev_centers, ev_k, ev_metric_dim, ev_nodiv,
                                ev_mesh_dir, ev_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const vs::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const vs::CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 3;
    } catch (const vs::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
