// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#include "core/io.h"

#include <cstdio>
#include <cstring>
#include <memory>

namespace voxsyn {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path + "'");
    return f;
}

void write_bytes(std::FILE* f, const void* p, std::size_t n, const std::string& path) {
    if (std::fwrite(p, 1, n, f) != n) throw IoError("short write to '" + path + "'");
}

void read_bytes(std::FILE* f, void* p, std::size_t n, const std::string& path) {
    if (std::fread(p, 1, n, f) != n) throw IoError("short read from '" + path + "'");
}

void write_u32(std::FILE* f, std::uint32_t v, const std::string& path) {
    unsigned char b[4] = {(unsigned char)(v), (unsigned char)(v >> 8), (unsigned char)(v >> 16),
                          (unsigned char)(v >> 24)};
    write_bytes(f, b, 4, path);
}

std::uint32_t read_u32(std::FILE* f, const std::string& path) {
    unsigned char b[4];
    read_bytes(f, b, 4, path);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void write_f32(std::FILE* f, float v, const std::string& path) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(f, bits, path);
}

float read_f32(std::FILE* f, const std::string& path) {
    const std::uint32_t bits = read_u32(f, path);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

// bulk f32 arrays assume a little-endian host; checked once at load/store
bool host_is_little_endian() {
    const std::uint32_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    return b == 1;
}

void write_f32_array(std::FILE* f, const float* v, std::size_t n, const std::string& path) {
    if (host_is_little_endian()) {
        write_bytes(f, v, n * 4, path);
    } else {
        for (std::size_t i = 0; i < n; ++i) write_f32(f, v[i], path);
    }
}

void read_f32_array(std::FILE* f, float* v, std::size_t n, const std::string& path) {
    if (host_is_little_endian()) {
        read_bytes(f, v, n * 4, path);
    } else {
        for (std::size_t i = 0; i < n; ++i) v[i] = read_f32(f, path);
    }
}

void expect_magic(std::FILE* f, const char* magic, const std::string& path) {
    char buf[4];
    read_bytes(f, buf, 4, path);
    if (std::memcmp(buf, magic, 4) != 0)
        throw IoError("'" + path + "' is not a " + magic + " file");
}

}  // namespace

void write_vxg_raw(const std::string& path, Int3 dims, const BBox& bbox, int channels,
                   const std::vector<float>& interleaved) {
    if (interleaved.size() != std::size_t(dims.volume()) * std::size_t(channels))
        throw IoError("VXG payload size mismatch for '" + path + "'");
    FilePtr f = open_file(path, "wb");
    write_bytes(f.get(), "VXG1", 4, path);
    write_u32(f.get(), std::uint32_t(dims.x), path);
    write_u32(f.get(), std::uint32_t(dims.y), path);
    write_u32(f.get(), std::uint32_t(dims.z), path);
    write_u32(f.get(), std::uint32_t(channels), path);
    for (int a = 0; a < 3; ++a) write_f32(f.get(), float(bbox.half[a]), path);
    write_f32_array(f.get(), interleaved.data(), interleaved.size(), path);
}

void write_vxg(const std::string& path, const VoxelGrid& grid) {
    const std::size_t n = grid.voxel_count();
    std::vector<float> payload(n * 28);
    for (std::size_t i = 0; i < n; ++i) {
        float* v = payload.data() + i * 28;
        v[0] = grid.density[i];
        std::memcpy(v + 1, grid.sh_at(i), kShCoeffs * sizeof(float));
    }
    write_vxg_raw(path, grid.dims, grid.bbox, 28, payload);
}

VoxelGrid read_vxg(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    expect_magic(f.get(), "VXG1", path);
    Int3 dims;
    dims.x = int(read_u32(f.get(), path));
    dims.y = int(read_u32(f.get(), path));
    dims.z = int(read_u32(f.get(), path));
    const int channels = int(read_u32(f.get(), path));
    if (channels != 28)
        throw IoError("'" + path + "' has " + std::to_string(channels) +
                      " channels; expected 28 (density + 27 SH)");
    BBox bbox;
    for (int a = 0; a < 3; ++a) bbox.half[a] = double(read_f32(f.get(), path));
    VoxelGrid grid = make_voxel_grid(dims, bbox);
    const std::size_t n = grid.voxel_count();
    std::vector<float> payload(n * 28);
    read_f32_array(f.get(), payload.data(), payload.size(), path);
    for (std::size_t i = 0; i < n; ++i) {
        const float* v = payload.data() + i * 28;
        grid.density[i] = v[0];
        std::memcpy(grid.sh_at(i), v + 1, kShCoeffs * sizeof(float));
    }
    enforce_occupancy(grid);
    return grid;
}

void write_vxm(const std::string& path, const MappingField& field) {
    FilePtr f = open_file(path, "wb");
    write_bytes(f.get(), "VXM1", 4, path);
    write_u32(f.get(), std::uint32_t(field.dims.x), path);
    write_u32(f.get(), std::uint32_t(field.dims.y), path);
    write_u32(f.get(), std::uint32_t(field.dims.z), path);
    for (int a = 0; a < 3; ++a) write_f32(f.get(), float(field.bbox.half[a]), path);
    for (int a = 0; a < 3; ++a) write_f32(f.get(), float(field.exemplar_bbox.half[a]), path);
    std::vector<float> payload(field.coords.size());
    for (std::size_t i = 0; i < payload.size(); ++i) payload[i] = float(field.coords[i]);
    write_f32_array(f.get(), payload.data(), payload.size(), path);
}

MappingField read_vxm(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    expect_magic(f.get(), "VXM1", path);
    Int3 dims;
    dims.x = int(read_u32(f.get(), path));
    dims.y = int(read_u32(f.get(), path));
    dims.z = int(read_u32(f.get(), path));
    BBox bbox, ex_bbox;
    for (int a = 0; a < 3; ++a) bbox.half[a] = double(read_f32(f.get(), path));
    for (int a = 0; a < 3; ++a) ex_bbox.half[a] = double(read_f32(f.get(), path));
    MappingField field = make_mapping_field(dims, bbox, ex_bbox);
    std::vector<float> payload(field.coords.size());
    read_f32_array(f.get(), payload.data(), payload.size(), path);
    for (std::size_t i = 0; i < payload.size(); ++i) field.coords[i] = double(payload[i]);
    if (const std::size_t moved = clamp_coords(field))
        emit_warning("'" + path + "': " + std::to_string(moved) +
                     " coordinates were outside the exemplar box and were clamped");
    return field;
}

void write_ppm(const std::string& path, int width, int height, const std::vector<float>& rgb) {
    if (rgb.size() != std::size_t(width) * std::size_t(height) * 3)
        throw IoError("PPM payload size mismatch for '" + path + "'");
    FilePtr f = open_file(path, "wb");
    const std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    write_bytes(f.get(), header.data(), header.size(), path);
    std::vector<unsigned char> bytes(rgb.size());
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const float v = clamp(rgb[i], 0.0f, 1.0f);
        bytes[i] = (unsigned char)(v * 255.0f + 0.5f);
    }
    write_bytes(f.get(), bytes.data(), bytes.size(), path);
}

}  // namespace voxsyn
