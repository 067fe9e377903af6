#include "neumann/semigroup.hpp"

#include <cmath>

#include "neumann/parallel.hpp"

namespace neumann {

namespace {

constexpr double k_overflow = 1e300;

// Streams one path and accumulates PathStats. The exponential integrals use
// multiplicative running weights:
//   gB_i = exp(2*sigma*l_i - 2*K*t_i)           (integrand of int_B)
//   gA_i = exp(-2*sigma*l_i - 2*K*t_i)          (int_A after substitution
//          s -> t - u equals exp(2*sigma*l_t + 2*K*t) * \int gA_u du)
struct StatsVisitor {
    const StatsRequest* req;
    // request fields hoisted into flat members in begin(): the hot step()
    // must not chase pointers the optimizer cannot prove non-aliased
    bool want_integrals = false, want_k1 = false, want_k2 = false;
    double sigma2 = 0.0;  // 2 * sigma
    double dt = 0.0;
    double t = 0.0;
    double decay = 1.0;  // exp(-2*K*dt)
    Vec x_last;
    double l = 0.0;
    double gA = 1.0, gB = 1.0, gA_prev = 1.0, gB_prev = 1.0;
    double sumA = 0.0, sumB = 0.0;
    double k1_prev = 0.0, sumK1 = 0.0, sumK2 = 0.0;

    void begin(Vec x0, long n, double dt_eff) {
        dt = dt_eff;
        t = dt_eff * static_cast<double>(n);
        decay = std::exp(-2.0 * req->K * dt_eff);
        want_integrals = req->want_integrals;
        want_k1 = static_cast<bool>(req->K1);
        want_k2 = static_cast<bool>(req->K2);
        sigma2 = 2.0 * req->sigma;
        x_last = x0;
        if (want_k1) k1_prev = req->K1(x0);
    }

    void step(long /*i*/, Vec x, double l_cum, double dl) {
        x_last = x;
        l = l_cum;
        if (want_integrals) {
            gB *= decay;
            gA *= decay;
            if (dl > 0.0) {
                double e = std::exp(sigma2 * dl);
                gB *= e;
                gA /= e;
            }
            sumB += 0.5 * (gB_prev + gB) * dt;
            sumA += 0.5 * (gA_prev + gA) * dt;
            gB_prev = gB;
            gA_prev = gA;
        }
        if (want_k1) {
            double v = req->K1(x);
            sumK1 += 0.5 * (k1_prev + v) * dt;
            k1_prev = v;
        }
        if (want_k2 && dl > 0.0) sumK2 += req->K2(x) * dl;
    }

    PathStats finish() const {
        PathStats ps;
        ps.x_t = x_last;
        ps.l_t = l;
        if (want_integrals) {
            ps.int_B = sumB;
            ps.int_A = std::exp(sigma2 * l + 2.0 * req->K * t) * sumA;
        }
        ps.int_K1_ds = sumK1;
        ps.int_K2_dl = sumK2;
        if (!std::isfinite(ps.int_A) || !std::isfinite(ps.int_B) ||
            std::fabs(ps.int_A) > k_overflow || std::fabs(ps.int_B) > k_overflow)
            throw OverflowGuard("exponential path weight overflow; reduce sigma*t or K*t");
        return ps;
    }
};

struct MomentAcc {
    std::vector<double> sum, sumsq;
    long n = 0;
};

}  // namespace

std::vector<EstimateWithError> mc_estimate_many(const ManifoldModel& model, Vec x0, double t,
                                                const SimParams& params, const StatsRequest& req,
                                                const std::vector<PathEvaluator>& estimands) {
    if (signed_distance(model, x0) < -k_eps_proj)
        throw ConfigError("start point lies outside the domain closure");
    const std::size_t m = estimands.size();
    std::vector<EstimateWithError> out(m);
    if (t <= 0.0) {
        // Degenerate batch: X_0 = x0, all path statistics vanish.
        PathStats ps;
        ps.x_t = x0;
        for (std::size_t k = 0; k < m; ++k) out[k] = {estimands[k](ps), 0.0, params.n_paths};
        return out;
    }

    auto chunk_fn = [&](long begin, long end) {
        MomentAcc acc;
        acc.sum.assign(m, 0.0);
        acc.sumsq.assign(m, 0.0);
        for (long p = begin; p < end; ++p) {
            StatsVisitor vis;
            vis.req = &req;
            walk_path(model, x0, t, params.dt, params.base_seed, p, vis);
            PathStats ps = vis.finish();
            for (std::size_t k = 0; k < m; ++k) {
                double v = estimands[k](ps);
                if (!std::isfinite(v) || std::fabs(v) > k_overflow)
                    throw OverflowGuard("estimand overflow on path " + std::to_string(p));
                acc.sum[k] += v;
                acc.sumsq[k] += v * v;
            }
            ++acc.n;
        }
        return acc;
    };
    MomentAcc init;
    init.sum.assign(m, 0.0);
    init.sumsq.assign(m, 0.0);
    MomentAcc total = map_reduce_chunks<MomentAcc>(
        params.n_paths, k_chunk_paths, chunk_fn, std::move(init), [m](MomentAcc& a, MomentAcc&& b) {
            for (std::size_t k = 0; k < m; ++k) {
                a.sum[k] += b.sum[k];
                a.sumsq[k] += b.sumsq[k];
            }
            a.n += b.n;
        });

    double n = static_cast<double>(total.n);
    for (std::size_t k = 0; k < m; ++k) {
        double mean = total.sum[k] / n;
        double var = 0.0;
        if (total.n > 1) var = std::max(0.0, (total.sumsq[k] - n * mean * mean) / (n - 1.0));
        out[k] = {mean, std::sqrt(var / n), total.n};
    }
    return out;
}

EstimateWithError estimate_pt(const ManifoldModel& model, const TestFunction& f, Vec x, double t,
                              const SimParams& params) {
    StatsRequest req;
    std::vector<PathEvaluator> ev{[&f](const PathStats& ps) { return f.value(ps.x_t); }};
    return mc_estimate_many(model, x, t, params, req, ev)[0];
}

EstimateWithError estimate_weighted(const ManifoldModel& model, const TestFunction& f, Vec x,
                                    double t, const WeightedFunctional& w,
                                    const SimParams& params) {
    StatsRequest req;
    req.sigma = w.sigma;
    req.K = w.K;
    req.want_integrals =
        (w.integral == WeightedFunctional::Integral::A || w.integral == WeightedFunctional::Integral::B);
    if (w.integral == WeightedFunctional::Integral::Var) {
        req.K1 = w.K1;
        req.K2 = w.K2;
    }
    const TestFunction fn = f;
    const WeightedFunctional wf = w;
    PathEvaluator ev = [fn, wf](const PathStats& ps) {
        double term = 1.0;
        switch (wf.terminal) {
            case WeightedFunctional::Terminal::F: term = fn.value(ps.x_t); break;
            case WeightedFunctional::Terminal::F2: {
                double v = fn.value(ps.x_t);
                term = v * v;
                break;
            }
            case WeightedFunctional::Terminal::GradNorm2: term = fn.grad_norm2(ps.x_t); break;
            case WeightedFunctional::Terminal::GradNorm:
                term = std::sqrt(fn.grad_norm2(ps.x_t));
                break;
            case WeightedFunctional::Terminal::FLogF: {
                double v = fn.value(ps.x_t);
                term = v > 0.0 ? v * std::log(v) : 0.0;  // continuous extension at 0
                break;
            }
            case WeightedFunctional::Terminal::One: term = 1.0; break;
        }
        if (wf.lt_coeff != 0.0) term *= std::exp(wf.lt_coeff * ps.l_t);
        switch (wf.integral) {
            case WeightedFunctional::Integral::None: break;
            case WeightedFunctional::Integral::A: term *= ps.int_A; break;
            case WeightedFunctional::Integral::B: term *= ps.int_B; break;
            case WeightedFunctional::Integral::Var:
                term *= std::exp(wf.var_scale * (ps.int_K1_ds + ps.int_K2_dl));
                break;
        }
        return term;
    };
    return mc_estimate_many(model, x, t, params, req, {ev})[0];
}

GradPtEstimate grad_pt(const ManifoldModel& model, const TestFunction& f, Vec x, double t,
                       const SimParams& params) {
    const double h = std::max(1e-3, std::sqrt(params.dt));
    GradPtEstimate out;
    int dim = model.dimension();
    double se2 = 0.0;
    double center = 0.0;
    bool have_center = false;
    double center_se = 0.0;
    for (int i = 0; i < dim; ++i) {
        Vec e = (i == 0) ? Vec{1.0, 0.0} : Vec{0.0, 1.0};
        Vec xp = x + e * h, xm = x - e * h;
        bool ok_p = signed_distance(model, xp) >= 0.0;
        bool ok_m = signed_distance(model, xm) >= 0.0;
        double deriv = 0.0, comp_se = 0.0;
        if (ok_p && ok_m) {
            // Common random numbers: both runs reuse (base_seed, path index).
            EstimateWithError up = estimate_pt(model, f, xp, t, params);
            EstimateWithError um = estimate_pt(model, f, xm, t, params);
            deriv = (up.mean - um.mean) / (2.0 * h);
            comp_se = (up.se + um.se) / (2.0 * h);
        } else {
            out.step_clipped = true;
            if (!have_center) {
                EstimateWithError uc = estimate_pt(model, f, x, t, params);
                center = uc.mean;
                center_se = uc.se;
                have_center = true;
            }
            if (ok_p) {
                EstimateWithError up = estimate_pt(model, f, xp, t, params);
                deriv = (up.mean - center) / h;
                comp_se = (up.se + center_se) / h;
            } else if (ok_m) {
                EstimateWithError um = estimate_pt(model, f, xm, t, params);
                deriv = (center - um.mean) / h;
                comp_se = (center_se + um.se) / h;
            } else {
                throw ConfigError("grad_pt: stencil leaves the domain on both sides");
            }
        }
        if (i == 0)
            out.grad.x = deriv;
        else
            out.grad.y = deriv;
        se2 = std::max(se2, comp_se);
    }
    out.se = se2;
    return out;
}

}  // namespace neumann
