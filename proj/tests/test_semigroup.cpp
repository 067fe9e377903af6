#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "neumann/semigroup.hpp"

using namespace neumann;

namespace {

const double kPi = 3.14159265358979323846;

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

ManifoldModel half_line() { return {Shape::half_line(), DriftSpec::zero()}; }

}  // namespace

TEST_CASE("P_t x on the half-line from 0 equals 2 sqrt(t/pi)") {
    double t = 0.25;
    SimParams p{1e-4, 20000, 5};
    TestFunction f = TestFunction::coordinate(1);
    EstimateWithError e = estimate_pt(half_line(), f, {0.0}, t, p);
    double exact = 2.0 * std::sqrt(t / kPi);  // E |N(0, 2t)|
    CHECK(std::fabs(e.mean - exact) < 4.0 * e.se + 2.0 * std::sqrt(p.dt));
    CHECK(e.se > 0.0);
    CHECK(e.n == 20000);
}

TEST_CASE("t = 0 returns the function value exactly") {
    TestFunction f = TestFunction::radial_poly(1);
    SimParams p{1e-3, 100, 1};
    EstimateWithError e = estimate_pt(half_line(), f, {0.7}, 0.0, p);
    CHECK(e.mean == doctest::Approx(0.49));
    CHECK(e.se == 0.0);
}

TEST_CASE("exponential local-time moment matches the closed form") {
    // l_t ~ |N(0, v)| with v = 2t, so E exp(c l_t) = 2 exp(c^2 v / 2) Phi(c sqrt(v))
    double t = 0.25, c = 1.0, v = 2.0 * t;
    SimParams p{2e-5, 20000, 9};
    StatsRequest req;
    auto ests = mc_estimate_many(half_line(), {0.0}, t, p, req,
                                 {[c](const PathStats& ps) { return std::exp(c * ps.l_t); }});
    double exact = 2.0 * std::exp(c * c * v / 2.0) * Phi(c * std::sqrt(v));
    CHECK(std::fabs(ests[0].mean - exact) < 4.0 * ests[0].se + 3.0 * std::sqrt(p.dt));
}

TEST_CASE("time integrals are exact when sigma = 0") {
    // With sigma = 0 the integrands are deterministic:
    //   int_B = (1 - exp(-2Kt)) / (2K),  int_A = (exp(2Kt) - 1) / (2K)
    double t = 0.5, K = 0.8;
    SimParams p{1e-3, 64, 3};
    StatsRequest req;
    req.K = K;
    req.want_integrals = true;
    auto ests = mc_estimate_many(half_line(), {1.0}, t, p, req,
                                 {[](const PathStats& ps) { return ps.int_B; },
                                  [](const PathStats& ps) { return ps.int_A; }});
    CHECK(ests[0].mean == doctest::Approx((1.0 - std::exp(-2 * K * t)) / (2 * K)).epsilon(1e-5));
    CHECK(ests[0].se < 1e-7);  // deterministic up to round-off in the moment sums
    CHECK(ests[1].mean == doctest::Approx((std::exp(2 * K * t) - 1.0) / (2 * K)).epsilon(1e-5));
    // sigma = 0, K = 0 gives t for both
    StatsRequest req0;
    req0.want_integrals = true;
    auto e0 = mc_estimate_many(half_line(), {1.0}, t, p, req0,
                               {[](const PathStats& ps) { return ps.int_A - ps.int_B; }});
    CHECK(std::fabs(e0[0].mean) < 1e-12);
}

TEST_CASE("int_B is pathwise monotone in sigma") {
    ManifoldModel m{Shape::annulus(1.0, 2.0), DriftSpec::zero()};
    double t = 0.4;
    SimParams p{5e-4, 2000, 13};
    auto run = [&](double sigma) {
        StatsRequest req;
        req.sigma = sigma;
        req.want_integrals = true;
        return mc_estimate_many(m, {1.0, 0.0}, t, p, req,
                                {[](const PathStats& ps) { return ps.int_B; }})[0]
            .mean;
    };
    double b_half = run(0.5), b_one = run(1.0);
    CHECK(b_one > b_half);  // same driving noise, larger boundary weight
}

TEST_CASE("sample Cauchy-Schwarz holds on shared paths") {
    ManifoldModel m{Shape::annulus(1.0, 2.0), DriftSpec::zero()};
    TestFunction f = TestFunction::radial_poly(2);
    double t = 0.3;
    SimParams p{5e-4, 4000, 21};
    StatsRequest req;
    auto ests = mc_estimate_many(
        m, {1.2, 0.0}, t, p, req,
        {[&f](const PathStats& ps) { return f.value(ps.x_t) * std::exp(ps.l_t); },
         [&f](const PathStats& ps) {
             double v = f.value(ps.x_t);
             return v * v * std::exp(ps.l_t);
         },
         [](const PathStats& ps) { return std::exp(ps.l_t); }});
    CHECK(ests[0].mean * ests[0].mean <= ests[1].mean * ests[2].mean * (1.0 + 1e-12));
}

TEST_CASE("weighted functional kinds") {
    ManifoldModel m = half_line();
    double t = 0.2;
    SimParams p{1e-3, 2000, 33};
    TestFunction f = TestFunction::affine_positive(1, {0.5, 0.0}, 0.5, 0.5);

    WeightedFunctional one;
    one.terminal = WeightedFunctional::Terminal::One;
    CHECK(estimate_weighted(m, f, {0.4}, t, one, p).mean == doctest::Approx(1.0));

    WeightedFunctional flogf;
    flogf.terminal = WeightedFunctional::Terminal::FLogF;
    double v = estimate_weighted(m, f, {0.4}, t, flogf, p).mean;
    CHECK(v > 0.0);  // f >= 1 on its support here

    WeightedFunctional var;
    var.terminal = WeightedFunctional::Terminal::One;
    var.integral = WeightedFunctional::Integral::Var;
    var.K1 = [](Vec) { return -1.0; };
    var.K2 = [](Vec) { return 0.0; };
    // exp(int_0^t (-1) ds) = exp(-t) deterministically
    EstimateWithError ev = estimate_weighted(m, f, {0.4}, t, var, p);
    CHECK(ev.mean == doctest::Approx(std::exp(-t)).epsilon(1e-6));
}

TEST_CASE("gradient of the semigroup via common random numbers") {
    // half-line, f = x: d/dx E|x + sqrt(2t) G| = 2 Phi(x / sqrt(2t)) - 1
    double t = 0.25, x = 0.3;
    SimParams p{1e-4, 20000, 55};
    TestFunction f = TestFunction::coordinate(1);
    GradPtEstimate g = grad_pt(half_line(), f, {x}, t, p);
    double exact = 2.0 * Phi(x / std::sqrt(2.0 * t)) - 1.0;
    CHECK(std::fabs(g.grad.x - exact) < 0.02);
    CHECK_FALSE(g.step_clipped);

    // at the boundary the stencil must clip to one-sided
    GradPtEstimate gb = grad_pt(half_line(), f, {0.0}, t, p);
    CHECK(gb.step_clipped);
    CHECK(std::fabs(gb.grad.x) < 0.1);  // symmetric law -> zero slope at 0
}

TEST_CASE("results do not depend on the worker count") {
    ManifoldModel m{Shape::disk(1.0), DriftSpec::linear(0.5)};
    TestFunction f = TestFunction::radial_poly(2);
    double t = 0.2;
    SimParams p{1e-3, 10000, 77};
    setenv("NEUMANN_THREADS", "1", 1);
    EstimateWithError a = estimate_pt(m, f, {0.3, 0.1}, t, p);
    setenv("NEUMANN_THREADS", "4", 1);
    EstimateWithError b = estimate_pt(m, f, {0.3, 0.1}, t, p);
    unsetenv("NEUMANN_THREADS");
    CHECK(a.mean == b.mean);  // bitwise
    CHECK(a.se == b.se);
}

TEST_CASE("overflow guard fires on runaway weights") {
    SimParams p{1e-3, 256, 1};
    StatsRequest req;
    auto huge = [](const PathStats& ps) { return std::exp(2000.0 * (1.0 + ps.l_t)); };
    CHECK_THROWS_AS(mc_estimate_many(half_line(), {0.0}, 0.1, p, req, {huge}), OverflowGuard);
}
