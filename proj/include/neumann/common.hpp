#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace neumann {

// Tolerance for "point lies on the boundary" tests and for the corner
// exclusion radius on rectangles.
inline constexpr double k_eps_proj = 1e-9;

// 2D vector; 1D models use only the first component.
struct Vec {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec() = default;
    constexpr Vec(double x_, double y_ = 0.0) : x(x_), y(y_) {}

    constexpr Vec operator+(Vec o) const { return {x + o.x, y + o.y}; }
    constexpr Vec operator-(Vec o) const { return {x - o.x, y - o.y}; }
    constexpr Vec operator*(double c) const { return {x * c, y * c}; }
    constexpr Vec operator-() const { return {-x, -y}; }
    Vec& operator+=(Vec o) {
        x += o.x;
        y += o.y;
        return *this;
    }

    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }
    constexpr double dot(Vec o) const { return x * o.x + y * o.y; }
};

inline constexpr Vec operator*(double c, Vec v) { return v * c; }

struct RectangleCorner : std::runtime_error {
    explicit RectangleCorner(const std::string& what) : std::runtime_error(what) {}
};
struct UnsupportedDrift : std::runtime_error {
    explicit UnsupportedDrift(const std::string& what) : std::runtime_error(what) {}
};
struct ProjectionFailure : std::runtime_error {
    ProjectionFailure(const std::string& what, long path_index = -1)
        : std::runtime_error(what), path_index(path_index) {}
    long path_index;
};
struct OverflowGuard : std::runtime_error {
    explicit OverflowGuard(const std::string& what) : std::runtime_error(what) {}
};
struct UnsupportedShape : std::runtime_error {
    explicit UnsupportedShape(const std::string& what) : std::runtime_error(what) {}
};
struct ResolutionTooCoarse : std::runtime_error {
    explicit ResolutionTooCoarse(const std::string& what) : std::runtime_error(what) {}
};
struct NoisyLimit : std::runtime_error {
    explicit NoisyLimit(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateGradient : std::runtime_error {
    explicit DegenerateGradient(const std::string& what) : std::runtime_error(what) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace neumann
