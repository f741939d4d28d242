// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace voxsyn {

// Bad arguments / configuration. CLI exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested computation exceeds its memory/element budget. CLI exit code 3.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// File read/write failures. CLI exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-fatal conditions (empty marching-cubes mesh, clamped proxy coordinates).
// Default sink writes to stderr; tests may capture.
void emit_warning(const std::string& msg);
void set_warning_sink(std::function<void(const std::string&)> sink);

}  // namespace voxsyn
