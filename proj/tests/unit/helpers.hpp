#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "csgesture/error.hpp"
#include "doctest.h"

// Checks that `expr` throws csg::Error carrying `expected`.
#define CHECK_CODE(expr, expected)                                      \
    do {                                                                \
        bool thrown_ = false;                                           \
        try {                                                           \
            (void)(expr);                                               \
        } catch (const csg::Error& e_) {                                \
            thrown_ = true;                                             \
            CHECK_MESSAGE(e_.code() == (expected), std::string(csg::to_string(e_.code()))); \
        }                                                               \
        CHECK_MESSAGE(thrown_, "expected " << std::string(csg::to_string(expected))); \
    } while (0)

namespace testutil {

/// Fresh directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("csg_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
