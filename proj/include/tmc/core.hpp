#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace tmc {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

// Input did not satisfy an operation's precondition.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Geometry became degenerate (zero area, pinched profile, singular system, ...).
struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A hard resource guard (subdivision depth, bump count, ...) was exceeded.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file input.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kPi = 3.14159265358979323846;

// Locale-independent float formatting at 12 significant digits, used by all
// file/CSV/stdout emitters so runs are byte-reproducible.
inline std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace tmc
