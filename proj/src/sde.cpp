#include "neumann/sde.hpp"

namespace neumann {

namespace {

struct RecordingVisitor {
    PathSample* out;
    void begin(Vec x0, long n, double dt_eff) {
        out->times.resize(static_cast<std::size_t>(n) + 1);
        out->positions.resize(static_cast<std::size_t>(n) + 1);
        out->local_time.resize(static_cast<std::size_t>(n) + 1);
        out->times[0] = 0.0;
        out->positions[0] = x0;
        out->local_time[0] = 0.0;
        dt = dt_eff;
    }
    void step(long i, Vec x, double l, double /*dl*/) {
        out->times[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
        out->positions[static_cast<std::size_t>(i)] = x;
        out->local_time[static_cast<std::size_t>(i)] = l;
    }
    double dt = 0.0;
};

}  // namespace

PathSample simulate_reflected_path(const ManifoldModel& model, Vec x0, double t,
                                   const SimParams& params, long path_index) {
    if (signed_distance(model, x0) < -k_eps_proj)
        throw ConfigError("start point lies outside the domain closure");
    PathSample out;
    out.seed = params.base_seed;
    RecordingVisitor vis{&out};
    walk_path(model, x0, t, params.dt, params.base_seed, path_index, vis);
    return out;
}

void simulate_batch(const ManifoldModel& model, Vec x0, double t, const SimParams& params,
                    const std::function<void(const PathSample&, long)>& consume) {
    for (long i = 0; i < params.n_paths; ++i) {
        PathSample p = simulate_reflected_path(model, x0, t, params, i);
        consume(p, i);
    }
}

std::optional<double> exit_time(const PathSample& path, Vec x0, double delta) {
    for (std::size_t i = 0; i < path.positions.size(); ++i) {
        if ((path.positions[i] - x0).norm() >= delta) return path.times[i];
    }
    return std::nullopt;
}

}  // namespace neumann
