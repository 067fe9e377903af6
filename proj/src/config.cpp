#include "neumann/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "neumann/test_functions.hpp"

namespace neumann {

namespace {

using njson = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("field '" + field + "': " + what);
}

double get_number(const njson& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

double req_number(const njson& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) fail(ctx + "." + key, "missing");
    return get_number(j.at(key), ctx + "." + key);
}

std::string req_string(const njson& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) fail(ctx + "." + key, "missing");
    if (!j.at(key).is_string()) fail(ctx + "." + key, "expected a string");
    return j.at(key).get<std::string>();
}

Vec parse_point(const njson& j, int dim, const std::string& field) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
        fail(field, "expected an array of " + std::to_string(dim) + " coordinate(s)");
    Vec x{get_number(j.at(0), field + "[0]"), 0.0};
    if (dim == 2) x.y = get_number(j.at(1), field + "[1]");
    return x;
}

Shape parse_shape(const njson& j, const std::string& ctx) {
    std::string kind = req_string(j, "shape", ctx);
    if (kind == "half_line") return Shape::half_line();
    if (kind == "interval") return Shape::interval(req_number(j, "a", ctx), req_number(j, "b", ctx));
    if (kind == "disk") return Shape::disk(req_number(j, "radius", ctx));
    if (kind == "annulus")
        return Shape::annulus(req_number(j, "r_in", ctx), req_number(j, "r_out", ctx));
    if (kind == "rectangle")
        return Shape::rectangle(req_number(j, "width", ctx), req_number(j, "height", ctx));
    fail(ctx + ".shape", "unknown shape '" + kind + "' (half_line, interval, disk, annulus, "
                         "rectangle)");
}

DriftSpec parse_drift(const njson& j, const std::string& ctx) {
    if (!j.contains("drift")) return DriftSpec::zero();
    const njson& d = j.at("drift");
    std::string kind = req_string(d, "kind", ctx + ".drift");
    if (kind == "zero") return DriftSpec::zero();
    if (kind == "linear") return DriftSpec::linear(req_number(d, "coeff", ctx + ".drift"));
    if (kind == "gradient_potential")
        return DriftSpec::gradient_potential(req_string(d, "potential", ctx + ".drift"),
                                             req_number(d, "param", ctx + ".drift"));
    fail(ctx + ".drift.kind", "unknown drift '" + kind + "' (zero, linear, gradient_potential)");
}

JobSpec parse_job(const njson& j, int dim, const std::string& ctx) {
    JobSpec job;
    std::string type = req_string(j, "type", ctx);
    if (type == "statement")
        job.type = JobSpec::Type::Statement;
    else if (type == "variable")
        job.type = JobSpec::Type::VariableBound;
    else if (type == "levy_gromov")
        job.type = JobSpec::Type::LevyGromov;
    else if (type == "estimate_ii")
        job.type = JobSpec::Type::EstimateII;
    else
        fail(ctx + ".type",
             "unknown job type '" + type + "' (statement, variable, levy_gromov, estimate_ii)");

    if (j.contains("times")) {
        if (!j.at("times").is_array()) fail(ctx + ".times", "expected an array");
        for (std::size_t i = 0; i < j.at("times").size(); ++i)
            job.times.push_back(
                get_number(j.at("times").at(i), ctx + ".times[" + std::to_string(i) + "]"));
    }

    if (job.type == JobSpec::Type::EstimateII) {
        if (!j.contains("x")) fail(ctx + ".x", "missing");
        job.points.push_back(parse_point(j.at("x"), dim, ctx + ".x"));
        if (!j.contains("v")) fail(ctx + ".v", "missing");
        job.v = parse_point(j.at("v"), dim, ctx + ".v");
        job.p = j.contains("p") ? get_number(j.at("p"), ctx + ".p") : 2.0;
        if (job.times.size() < 4) fail(ctx + ".times", "estimate_ii needs at least 4 times");
        return job;
    }

    job.f = req_string(j, "f", ctx);
    if (!j.contains("points") || !j.at("points").is_array() || j.at("points").empty())
        fail(ctx + ".points", "expected a non-empty array of points");
    for (std::size_t i = 0; i < j.at("points").size(); ++i)
        job.points.push_back(
            parse_point(j.at("points").at(i), dim, ctx + ".points[" + std::to_string(i) + "]"));
    if (job.times.empty()) fail(ctx + ".times", "expected a non-empty array of times");
    for (std::size_t i = 0; i < job.times.size(); ++i)
        if (job.times[i] <= 0.0 && job.type != JobSpec::Type::LevyGromov)
            fail(ctx + ".times[" + std::to_string(i) + "]", "must be > 0");

    if (job.type == JobSpec::Type::Statement || job.type == JobSpec::Type::VariableBound) {
        if (!j.contains("statements") || !j.at("statements").is_array() ||
            j.at("statements").empty())
            fail(ctx + ".statements", "expected a non-empty array");
        for (const auto& s : j.at("statements")) {
            if (!s.is_string()) fail(ctx + ".statements", "entries must be strings");
            job.statements.push_back(s.get<std::string>());
        }
        const std::vector<std::string> allowed =
            job.type == JobSpec::Type::Statement
                ? std::vector<std::string>{"S2", "S3", "S4", "S5", "S6", "S7"}
                : std::vector<std::string>{"G2", "G3"};
        for (const auto& s : job.statements)
            if (std::find(allowed.begin(), allowed.end(), s) == allowed.end())
                fail(ctx + ".statements", "unknown statement '" + s + "'");
    }
    if (job.type == JobSpec::Type::VariableBound) {
        job.K1 = j.contains("K1") ? get_number(j.at("K1"), ctx + ".K1") : 0.0;
        job.K2 = j.contains("K2") ? get_number(j.at("K2"), ctx + ".K2") : 0.0;
    }
    if (job.type == JobSpec::Type::LevyGromov)
        job.stationary = j.contains("stationary") && j.at("stationary").is_boolean() &&
                         j.at("stationary").get<bool>();
    return job;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("model")) fail("model", "missing");
    cfg.model.shape = parse_shape(j.at("model"), "model");
    cfg.model.drift = parse_drift(j.at("model"), "model");
    int dim = cfg.model.dimension();

    if (j.contains("sim")) {
        const njson& s = j.at("sim");
        if (s.contains("dt")) cfg.opt.sim.dt = get_number(s.at("dt"), "sim.dt");
        if (s.contains("paths"))
            cfg.opt.sim.n_paths = static_cast<long>(get_number(s.at("paths"), "sim.paths"));
        if (s.contains("seed"))
            cfg.opt.sim.base_seed =
                static_cast<std::uint64_t>(get_number(s.at("seed"), "sim.seed"));
        if (cfg.opt.sim.dt <= 0.0) fail("sim.dt", "must be > 0");
        if (cfg.opt.sim.n_paths < 1) fail("sim.paths", "must be >= 1");
    }
    if (j.contains("pde")) {
        const njson& p = j.at("pde");
        if (p.contains("cells"))
            cfg.opt.pde.n_cells = static_cast<int>(get_number(p.at("cells"), "pde.cells"));
        if (p.contains("modes"))
            cfg.opt.pde.n_modes = static_cast<int>(get_number(p.at("modes"), "pde.modes"));
        if (cfg.opt.pde.n_cells < 8) fail("pde.cells", "must be >= 8");
        if (cfg.opt.pde.n_modes < 1) fail("pde.modes", "must be >= 1");
    }
    if (j.contains("overrides")) {
        const njson& o = j.at("overrides");
        if (o.contains("K")) cfg.opt.K_override = get_number(o.at("K"), "overrides.K");
        if (o.contains("sigma"))
            cfg.opt.sigma_override = get_number(o.at("sigma"), "overrides.sigma");
    }
    if (j.contains("start")) cfg.start = parse_point(j.at("start"), dim, "start");
    if (j.contains("horizon")) {
        cfg.horizon = get_number(j.at("horizon"), "horizon");
        if (cfg.horizon <= 0.0) fail("horizon", "must be > 0");
    }
    if (j.contains("jobs")) {
        if (!j.at("jobs").is_array()) fail("jobs", "expected an array");
        for (std::size_t i = 0; i < j.at("jobs").size(); ++i)
            cfg.jobs.push_back(
                parse_job(j.at("jobs").at(i), dim, "jobs[" + std::to_string(i) + "]"));
    }

    // resolve every referenced function id against the model's registry
    auto reg = default_registry(cfg.model);
    for (std::size_t i = 0; i < cfg.jobs.size(); ++i) {
        const JobSpec& job = cfg.jobs[i];
        if (job.type == JobSpec::Type::EstimateII) continue;
        bool found = false;
        std::string avail;
        for (const auto& tf : reg) {
            if (tf.id == job.f) found = true;
            avail += (avail.empty() ? "" : ", ") + tf.id;
        }
        if (!found)
            fail("jobs[" + std::to_string(i) + "].f",
                 "unknown function '" + job.f + "' (available: " + avail + ")");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

int RunResult::count(Verdict v) const {
    int n = 0;
    for (const auto& r : rows)
        if (r.verdict == v) ++n;
    return n;
}

RunResult run_jobs(const ExperimentConfig& cfg, const std::vector<JobSpec::Type>& only) {
    RunResult out;
    auto reg = default_registry(cfg.model);
    auto find_f = [&reg](const std::string& id) -> const TestFunction& {
        for (const auto& tf : reg)
            if (tf.id == id) return tf;
        throw ConfigError("unknown function '" + id + "'");
    };
    auto selected = [&only](JobSpec::Type t) {
        return only.empty() || std::find(only.begin(), only.end(), t) != only.end();
    };
    for (const auto& job : cfg.jobs) {
        if (!selected(job.type)) continue;
        switch (job.type) {
            case JobSpec::Type::Statement: {
                const TestFunction& f = find_f(job.f);
                for (Vec x : job.points)
                    for (double t : job.times)
                        for (auto& r :
                             check_statement_suite(job.statements, cfg.model, f, x, t, cfg.opt))
                            out.rows.push_back(std::move(r));
                break;
            }
            case JobSpec::Type::VariableBound: {
                const TestFunction& f = find_f(job.f);
                double k1 = job.K1, k2 = job.K2;
                ScalarField K1 = [k1](Vec) { return k1; };
                ScalarField K2 = [k2](Vec) { return k2; };
                for (Vec x : job.points)
                    for (double t : job.times)
                        for (const auto& which : job.statements)
                            out.rows.push_back(check_variable_bounds(cfg.model, f, x, t, K1, K2,
                                                                     which, cfg.opt));
                break;
            }
            case JobSpec::Type::LevyGromov: {
                const TestFunction& f = find_f(job.f);
                for (Vec x : job.points)
                    for (double t : job.times) {
                        double stat = 0.0;
                        InequalityReport r = check_levy_gromov(
                            cfg.model, f, x, t, cfg.opt, job.stationary ? &stat : nullptr);
                        bool with_stat = job.stationary;
                        out.rows.push_back(r);
                        if (with_stat) {
                            InequalityReport s = r;
                            s.statement = "LG41";
                            s.rhs = stat;
                            s.verdict = resolve_verdict(s.lhs, s.rhs, s.se, s.margin);
                            out.rows.push_back(std::move(s));
                        }
                    }
                break;
            }
            case JobSpec::Type::EstimateII:
                out.ii.push_back(
                    estimate_ii(cfg.model, job.points[0], job.v, job.p, job.times, cfg.opt));
                break;
        }
    }
    return out;
}

}  // namespace neumann
