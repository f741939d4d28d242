// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace voxsyn {

struct Int3 {
    int x = 0, y = 0, z = 0;

    int operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    int& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }

    friend bool operator==(const Int3&, const Int3&) = default;
    friend Int3 operator+(Int3 a, Int3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Int3 operator-(Int3 a, Int3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

    std::int64_t volume() const {
        return std::int64_t(x) * std::int64_t(y) * std::int64_t(z);
    }
    int max_dim() const { return x > y ? (x > z ? x : z) : (y > z ? y : z); }
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
    double& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    friend Vec3 operator*(double s, Vec3 a) { return a * s; }
    friend Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    Vec3& operator+=(Vec3 b) { x += b.x; y += b.y; z += b.z; return *this; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }

// x-fastest linearization shared by every grid in the project.
inline std::size_t linear_index(Int3 dims, int x, int y, int z) {
    return std::size_t(x) + std::size_t(dims.x) * (std::size_t(y) + std::size_t(dims.y) * std::size_t(z));
}
inline std::size_t linear_index(Int3 dims, Int3 i) { return linear_index(dims, i.x, i.y, i.z); }

inline Int3 delinearize(Int3 dims, std::size_t idx) {
    const int x = int(idx % std::size_t(dims.x));
    idx /= std::size_t(dims.x);
    const int y = int(idx % std::size_t(dims.y));
    return {x, y, int(idx / std::size_t(dims.y))};
}

inline bool in_range(Int3 dims, Int3 i) {
    return i.x >= 0 && i.y >= 0 && i.z >= 0 && i.x < dims.x && i.y < dims.y && i.z < dims.z;
}

template <typename T>
T clamp(T v, T lo, T hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace voxsyn
