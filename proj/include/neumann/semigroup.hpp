#pragma once

#include <functional>
#include <vector>

#include "neumann/common.hpp"
#include "neumann/geometry.hpp"
#include "neumann/sde.hpp"
#include "neumann/test_functions.hpp"

namespace neumann {

struct EstimateWithError {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    long n = 0;
};

// Per-path summary produced by the streaming engine. The exponential time
// integrals are accumulated online (trapezoid in s), so no path storage is
// needed:
//   int_A = \int_0^t exp(2*sigma*(l_t - l_{t-s}) + 2*K*s) ds
//   int_B = \int_0^t exp(2*sigma*l_s - 2*K*s) ds
struct PathStats {
    Vec x_t;
    double l_t = 0.0;
    double int_A = 0.0;
    double int_B = 0.0;
    double int_K1_ds = 0.0;  // \int_0^t K1(X_s) ds
    double int_K2_dl = 0.0;  // \int_0^t K2(X_s) dl_s
};

using ScalarField = std::function<double(Vec)>;
using PathEvaluator = std::function<double(const PathStats&)>;

struct StatsRequest {
    double sigma = 0.0;
    double K = 0.0;
    bool want_integrals = false;  // fill int_A / int_B
    ScalarField K1;               // optional: fill int_K1_ds
    ScalarField K2;               // optional: fill int_K2_dl
};

// Shared-path Monte Carlo: simulates one batch of reflected paths from x0 and
// evaluates every estimand on each path. Deterministic for a fixed
// (params.base_seed, params.dt, params.n_paths) regardless of thread count.
// Throws OverflowGuard if any running weight leaves [-1e300, 1e300].
std::vector<EstimateWithError> mc_estimate_many(const ManifoldModel& model, Vec x0, double t,
                                                const SimParams& params, const StatsRequest& req,
                                                const std::vector<PathEvaluator>& estimands);

// P_t f(x) = E_x f(X_t). At t <= 0 returns f(x) exactly.
EstimateWithError estimate_pt(const ManifoldModel& model, const TestFunction& f, Vec x,
                              double t, const SimParams& params);

// E_x [ terminal(f)(X_t) * exp(lt_coeff * l_t) * integral-factor ].
struct WeightedFunctional {
    enum class Terminal { F, F2, GradNorm2, GradNorm, FLogF, One };
    enum class Integral { None, A, B, Var };

    Terminal terminal = Terminal::One;
    double lt_coeff = 0.0;   // weight exp(lt_coeff * l_t); 0 = no weight
    Integral integral = Integral::None;
    double sigma = 0.0;      // parameters of int_A / int_B
    double K = 0.0;
    ScalarField K1;          // Integral::Var factor exp(var_scale*(int_K1_ds + int_K2_dl))
    ScalarField K2;
    double var_scale = 1.0;
};

EstimateWithError estimate_weighted(const ManifoldModel& model, const TestFunction& f, Vec x,
                                    double t, const WeightedFunctional& w,
                                    const SimParams& params);

// grad P_t f(x) by central differences with common random numbers,
// h = max(1e-3, sqrt(dt)). Falls back to a one-sided stencil when x +- h e_i
// leaves the domain and reports it via step_clipped.
struct GradPtEstimate {
    Vec grad;
    double se = 0.0;  // conservative bound on the per-component statistical error
    bool step_clipped = false;
};

GradPtEstimate grad_pt(const ManifoldModel& model, const TestFunction& f, Vec x, double t,
                       const SimParams& params);

}  // namespace neumann
