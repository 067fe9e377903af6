#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "neumann/common.hpp"
#include "neumann/geometry.hpp"
#include "neumann/rng.hpp"

namespace neumann {

struct SimParams {
    double dt = 1e-4;
    long n_paths = 1;
    std::uint64_t base_seed = 0;
};

struct PathSample {
    std::vector<double> times;       // 0 = t_0 < ... < t_n = t, uniform step
    std::vector<Vec> positions;      // inside the closure of the domain
    std::vector<double> local_time;  // cumulative, nondecreasing, l_0 = 0
    std::uint64_t seed = 0;
};

// Linear drift coefficient of the model (all registered drifts are linear in
// flat coordinates). Throws UnsupportedDrift otherwise.
inline double linear_drift_coeff(const ManifoldModel& model) {
    switch (model.drift.kind) {
        case DriftKind::Zero:
            return 0.0;
        case DriftKind::Linear:
            return model.drift.coeff;
        case DriftKind::GradientPotential:
            if (model.drift.potential == "quadratic") return model.drift.potential_param;
            throw UnsupportedDrift("unknown potential '" + model.drift.potential + "'");
    }
    return 0.0;
}

inline long step_count(double t, double dt) {
    if (t <= 0.0) return 0;
    return static_cast<long>(std::ceil(t / dt - 1e-9));
}

namespace detail {

// One projection step per shape. Returns the local-time increment.
template <ShapeKind SK>
inline double project_step(const Shape& s, double& yx, double& yy, long path_index) {
    if constexpr (SK == ShapeKind::HalfLine) {
        if (yx < 0.0) {
            double dl = -yx;
            yx = 0.0;
            return dl;
        }
        return 0.0;
    } else if constexpr (SK == ShapeKind::Interval) {
        if (yx < s.a) {
            double dl = s.a - yx;
            yx = s.a;
            return dl;
        }
        if (yx > s.b) {
            double dl = yx - s.b;
            yx = s.b;
            return dl;
        }
        return 0.0;
    } else if constexpr (SK == ShapeKind::Disk) {
        double r2 = yx * yx + yy * yy;
        if (r2 > s.b * s.b) {
            double r = std::sqrt(r2);
            double f = s.b / r;
            yx *= f;
            yy *= f;
            return r - s.b;
        }
        return 0.0;
    } else if constexpr (SK == ShapeKind::Annulus) {
        double r = std::sqrt(yx * yx + yy * yy);
        if (r < s.a) {
            if (s.a - r > 0.5 * s.a)
                throw ProjectionFailure("annulus projection past medial axis; dt too large",
                                        path_index);
            double f = s.a / r;
            yx *= f;
            yy *= f;
            return s.a - r;
        }
        if (r > s.b) {
            double f = s.b / r;
            yx *= f;
            yy *= f;
            return r - s.b;
        }
        return 0.0;
    } else {  // Rectangle
        double cx = yx < 0.0 ? 0.0 : (yx > s.a ? s.a : yx);
        double cy = yy < 0.0 ? 0.0 : (yy > s.b ? s.b : yy);
        double dl = std::hypot(yx - cx, yy - cy);
        yx = cx;
        yy = cy;
        return dl;
    }
}

// has_drift = false skips the a*x*dt term; this is bitwise identical to
// evaluating it with a = 0 (x + 0 + z == x + z exactly) but avoids a
// floating-point dependency chain that dominates the step cost.
template <ShapeKind SK, bool has_drift, class Visitor>
void walk_loop(const Shape& s, double a, Vec x0, long n, double dt, PathRng& rng, Visitor& vis,
               long path_index) {
    const double sq = std::sqrt(2.0 * dt);
    double x = x0.x, y = x0.y, l = 0.0;
    constexpr bool two_d = (SK == ShapeKind::Disk || SK == ShapeKind::Annulus ||
                            SK == ShapeKind::Rectangle);
    for (long i = 1; i <= n; ++i) {
        double nx = x + sq * rng.normal();
        if constexpr (has_drift) nx += a * x * dt;
        double ny = y;
        if constexpr (two_d) {
            ny = y + sq * rng.normal();
            if constexpr (has_drift) ny += a * y * dt;
        }
        double dl = project_step<SK>(s, nx, ny, path_index);
        x = nx;
        y = ny;
        l += dl;
        vis.step(i, Vec{x, y}, l, dl);
    }
}

template <ShapeKind SK, class Visitor>
void walk_dispatch(const Shape& s, double a, Vec x0, long n, double dt, PathRng& rng, Visitor& vis,
                   long path_index) {
    if (a == 0.0)
        walk_loop<SK, false>(s, a, x0, n, dt, rng, vis, path_index);
    else
        walk_loop<SK, true>(s, a, x0, n, dt, rng, vis, path_index);
}

}  // namespace detail

// Core path engine: Euler step with explicit drift, nearest-point projection,
// local time accumulated as the projection distance. The visitor sees the
// state after every step:
//   vis.begin(x0, n, dt); vis.step(i, x_i, l_i, dl_i);
template <class Visitor>
void walk_path(const ManifoldModel& model, Vec x0, double t, double dt, std::uint64_t base_seed,
               long path_index, Visitor& vis) {
    long n = step_count(t, dt);
    double dt_eff = n > 0 ? t / static_cast<double>(n) : dt;
    vis.begin(x0, n, dt_eff);
    if (n == 0) return;
    PathRng rng(base_seed, static_cast<std::uint64_t>(path_index));
    double a = linear_drift_coeff(model);
    switch (model.shape.kind) {
        case ShapeKind::HalfLine:
            detail::walk_dispatch<ShapeKind::HalfLine>(model.shape, a, x0, n, dt_eff, rng, vis, path_index);
            break;
        case ShapeKind::Interval:
            detail::walk_dispatch<ShapeKind::Interval>(model.shape, a, x0, n, dt_eff, rng, vis, path_index);
            break;
        case ShapeKind::Disk:
            detail::walk_dispatch<ShapeKind::Disk>(model.shape, a, x0, n, dt_eff, rng, vis, path_index);
            break;
        case ShapeKind::Annulus:
            detail::walk_dispatch<ShapeKind::Annulus>(model.shape, a, x0, n, dt_eff, rng, vis, path_index);
            break;
        case ShapeKind::Rectangle:
            detail::walk_dispatch<ShapeKind::Rectangle>(model.shape, a, x0, n, dt_eff, rng, vis, path_index);
            break;
    }
}

PathSample simulate_reflected_path(const ManifoldModel& model, Vec x0, double t,
                                   const SimParams& params, long path_index);

// Streams n_paths independent paths, path i seeded by (base_seed, i).
void simulate_batch(const ManifoldModel& model, Vec x0, double t, const SimParams& params,
                    const std::function<void(const PathSample&, long)>& consume);

// First grid time with |X_t - x0| >= delta, or nullopt.
std::optional<double> exit_time(const PathSample& path, Vec x0, double delta);

}  // namespace neumann
