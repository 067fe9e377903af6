#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "neumann/checks.hpp"
#include "neumann/config.hpp"
#include "neumann/report.hpp"
#include "neumann/sde.hpp"

namespace {

using namespace neumann;

constexpr double kPi = 3.14159265358979323846;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<double> dt;
    std::string out_dir = ".";
    bool dump = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl, bool need_config) {
    auto* c = cmd->add_option("--config", fl.config_path, "experiment config (JSON)");
    if (need_config) c->required();
    cmd->add_option("--seed", fl.seed, "override sim.seed");
    cmd->add_option("--paths", fl.paths, "override sim.paths");
    cmd->add_option("--dt", fl.dt, "override sim.dt");
    cmd->add_option("--out", fl.out_dir, "output directory");
    cmd->add_flag("--dump", fl.dump, "dump per-path / per-node CSV data");
}

ExperimentConfig load_with_overrides(const CommonFlags& fl) {
    ExperimentConfig cfg = load_config(fl.config_path);
    if (fl.seed) cfg.opt.sim.base_seed = *fl.seed;
    if (fl.paths) {
        if (*fl.paths < 1) throw ConfigError("field '--paths': must be >= 1");
        cfg.opt.sim.n_paths = *fl.paths;
    }
    if (fl.dt) {
        if (*fl.dt <= 0.0) throw ConfigError("field '--dt': must be > 0");
        cfg.opt.sim.dt = *fl.dt;
    }
    return cfg;
}

int write_and_summarize(const RunResult& res, const ExperimentConfig& cfg,
                        const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream csv(fs::path(out_dir) / "report.csv", std::ios::binary);
        write_report_csv(csv, res.rows, cfg.model.dimension());
    }
    {
        std::ofstream js(fs::path(out_dir) / "report.json", std::ios::binary);
        write_report_json(js, res.rows, res.ii, cfg.model.dimension(), cfg.opt.sim.base_seed);
    }
    int fails = res.count(Verdict::Fail);
    int inconclusive = res.count(Verdict::Inconclusive);
    std::printf("%zu rows: %d PASS, %d FAIL, %d INCONCLUSIVE\n", res.rows.size(),
                res.count(Verdict::Pass), fails, inconclusive);
    for (const auto& e : res.ii)
        std::printf("II(%s; %s) = %s  (slope %s, residual %s)\n",
                    format_point(e.x, cfg.model.dimension()).c_str(),
                    format_point(e.v, cfg.model.dimension()).c_str(), format_num(e.value).c_str(),
                    format_num(e.slope).c_str(), format_num(e.residual).c_str());
    if (inconclusive > 0)
        std::printf("warning: %d INCONCLUSIVE row(s); see report.json for slack budgets\n",
                    inconclusive);
    return fails > 0 ? 1 : 0;
}

int cmd_simulate(const CommonFlags& fl) {
    ExperimentConfig cfg = load_with_overrides(fl);
    double sum_l = 0.0;
    long n_rows = 0;
    std::ofstream csv;
    if (fl.dump) {
        std::filesystem::create_directories(fl.out_dir);
        csv.open(std::filesystem::path(fl.out_dir) / "paths.csv", std::ios::binary);
        csv << "path,step,time,x,y,local_time\n";
    }
    for (long i = 0; i < cfg.opt.sim.n_paths; ++i) {
        PathSample p = simulate_reflected_path(cfg.model, cfg.start, cfg.horizon, cfg.opt.sim, i);
        sum_l += p.local_time.back();
        if (fl.dump) {
            for (std::size_t k = 0; k < p.times.size(); ++k) {
                csv << i << ',' << k << ',' << format_num(p.times[k]) << ','
                    << format_num(p.positions[k].x) << ',' << format_num(p.positions[k].y) << ','
                    << format_num(p.local_time[k]) << '\n';
                ++n_rows;
            }
        }
    }
    std::printf("%ld paths on %s, t = %s: mean local time %s\n", cfg.opt.sim.n_paths,
                cfg.model.id().c_str(), format_num(cfg.horizon).c_str(),
                format_num(sum_l / static_cast<double>(cfg.opt.sim.n_paths)).c_str());
    if (fl.dump) std::printf("wrote %ld rows to %s/paths.csv\n", n_rows, fl.out_dir.c_str());
    return 0;
}

// Built-in oracle suite: closed-form facts checked at desk scale.
int cmd_selftest() {
    int failures = 0;
    auto report = [&failures](bool ok, const char* name) {
        std::printf("%s - %s\n", ok ? "ok" : "FAIL", name);
        if (!ok) ++failures;
    };

    {  // half-line local time anchor: E l_t = 2 sqrt(t/pi)
        ManifoldModel m{Shape::half_line(), DriftSpec::zero()};
        SimParams sim{1e-4, 20000, 11};
        double t = 0.1;
        StatsRequest req;
        auto est = mc_estimate_many(m, {0.0, 0.0}, t, sim, req,
                                    {[](const PathStats& ps) { return ps.l_t; }});
        double exact = 2.0 * std::sqrt(t / kPi);
        double err = std::fabs(est[0].mean - exact);
        report(err <= std::max(3.0 * est[0].se, 0.03 * exact), "local-time mean anchor");
    }
    {  // K -> 0 constants
        KConsts lim = kconst(0.0, 0.7), near = kconst(1e-12, 0.7);
        bool ok = std::fabs(near.c_exp / lim.c_exp - 1.0) < 1e-6 &&
                  std::fabs(near.c_ls / lim.c_ls - 1.0) < 1e-6 &&
                  std::fabs(near.c_p / lim.c_p - 1.0) < 1e-6;
        report(ok, "kconst limits at K = 0");
    }
    {  // Gaussian profile
        bool ok = gaussian_profile(0.0) == 0.0 && gaussian_profile(1.0) == 0.0 &&
                  std::fabs(gaussian_profile(0.5) - 1.0 / std::sqrt(2.0 * kPi)) < 1e-10;
        report(ok, "gaussian profile anchors");
    }
    {  // MC mass conservation: P_t 1 = 1 exactly
        ManifoldModel m{Shape::disk(1.0), DriftSpec::linear(-0.5)};
        SimParams sim{5e-4, 4000, 3};
        StatsRequest req;
        auto est = mc_estimate_many(m, {0.2, 0.1}, 0.3, sim, req,
                                    {[](const PathStats&) { return 1.0; }});
        report(est[0].mean == 1.0, "Monte Carlo P_t 1 = 1");
    }
    {  // PDE oracle: interval eigenfunction decay
        ManifoldModel m{Shape::interval(0.0, kPi), DriftSpec::zero()};
        GridField g = solve_neumann_heat(m, [](Vec x) { return std::cos(x.x); }, 0.5);
        double err = std::fabs(g.value({1.0, 0.0}) - std::exp(-0.5) * std::cos(1.0));
        report(err <= 1e-4, "PDE eigenfunction decay");
    }
    {  // sample-level Cauchy-Schwarz between the S2 and S3 weights
        ManifoldModel m{Shape::annulus(0.5, 1.5), DriftSpec::zero()};
        auto reg = default_registry(m);
        SimParams sim{5e-4, 4000, 5};
        double sigma = curvature_bounds(m).sigma;
        StatsRequest req;
        req.sigma = sigma;
        const TestFunction& f = reg[0];
        auto est = mc_estimate_many(
            m, {1.0, 0.0}, 0.2, sim, req,
            {[&f, sigma](const PathStats& ps) {
                 return std::sqrt(f.grad_norm2(ps.x_t)) * std::exp(sigma * ps.l_t);
             },
             [&f](const PathStats& ps) { return f.grad_norm2(ps.x_t); },
             [sigma](const PathStats& ps) { return std::exp(2.0 * sigma * ps.l_t); }});
        report(est[0].mean * est[0].mean <= est[1].mean * est[2].mean * (1.0 + 1e-12),
               "sample Cauchy-Schwarz (S2 vs S3 weights)");
    }
    {  // shared-batch identity: RHS(S5) = RHS(S4)/2
        ManifoldModel m{Shape::disk(1.0), DriftSpec::zero()};
        auto reg = default_registry(m);
        CheckOptions opt;
        opt.sim = {5e-4, 2000, 9};
        opt.pde.n_cells = 128;
        auto rows = check_statement_suite({"S4", "S5"}, m, reg[0], {0.3, 0.2}, 0.1, opt);
        report(rows[1].rhs == 0.5 * rows[0].rhs, "RHS(S5) = RHS(S4)/2 on the shared batch");
    }
    std::printf(failures == 0 ? "selftest: all checks passed\n"
                              : "selftest: %d check(s) failed\n",
                failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for Neumann-semigroup curvature inequalities"};
    app.require_subcommand(1);

    CommonFlags fl_run, fl_sim, fl_check, fl_ii, fl_iso;
    auto* run = app.add_subcommand("run", "run every job in a config");
    add_common(run, fl_run, true);
    auto* sim = app.add_subcommand("simulate", "simulate reflected paths, optionally dump CSV");
    add_common(sim, fl_sim, true);
    auto* check = app.add_subcommand("check", "run statement / variable-bound jobs");
    add_common(check, fl_check, true);
    auto* ii = app.add_subcommand("estimate-ii", "second-fundamental-form extraction jobs");
    add_common(ii, fl_ii, true);
    auto* iso = app.add_subcommand("isoperimetric", "Levy-Gromov jobs");
    add_common(iso, fl_iso, true);
    app.add_subcommand("selftest", "built-in oracle suite, no config needed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("selftest")) return cmd_selftest();
        if (app.got_subcommand("simulate")) return cmd_simulate(fl_sim);

        const CommonFlags& fl = app.got_subcommand("run")      ? fl_run
                                : app.got_subcommand("check")  ? fl_check
                                : app.got_subcommand("estimate-ii") ? fl_ii
                                                                    : fl_iso;
        std::vector<JobSpec::Type> only;
        if (app.got_subcommand("check"))
            only = {JobSpec::Type::Statement, JobSpec::Type::VariableBound};
        else if (app.got_subcommand("estimate-ii"))
            only = {JobSpec::Type::EstimateII};
        else if (app.got_subcommand("isoperimetric"))
            only = {JobSpec::Type::LevyGromov};

        ExperimentConfig cfg = load_with_overrides(fl);
        RunResult res = run_jobs(cfg, only);
        return write_and_summarize(res, cfg, fl.out_dir);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
