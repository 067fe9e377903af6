#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "neumann/checks.hpp"

using namespace neumann;

namespace {
const double kPi = 3.14159265358979323846;

CheckOptions quick_opts() {
    CheckOptions opt;
    opt.sim.dt = 5e-4;
    opt.sim.n_paths = 20000;
    opt.sim.base_seed = 7;
    opt.pde.n_cells = 256;
    return opt;
}
}  // namespace

TEST_CASE("kconst closed forms and K -> 0 limits") {
    // K = 0 exactly: (2t, 1/t, 1/(2t^2))
    KConsts z = kconst(0.0, 2.0);
    CHECK(z.c_exp == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(z.c_ls == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(z.c_p == doctest::Approx(0.125).epsilon(1e-14));
    // K = 1, t = 1 against direct formulas
    KConsts k1 = kconst(1.0, 1.0);
    CHECK(k1.c_exp == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
    CHECK(k1.c_ls == doctest::Approx(2.0 / (1.0 - std::exp(-2.0))).epsilon(1e-14));
    CHECK(k1.c_p == doctest::Approx(2.0 / std::pow(1.0 - std::exp(-2.0), 2)).epsilon(1e-14));
    // continuity across the limit branch
    for (double K : {1e-12, -1e-12}) {
        KConsts near = kconst(K, 2.0);
        CHECK(near.c_exp == doctest::Approx(z.c_exp).epsilon(1e-6));
        CHECK(near.c_ls == doctest::Approx(z.c_ls).epsilon(1e-6));
        CHECK(near.c_p == doctest::Approx(z.c_p).epsilon(1e-6));
    }
}

TEST_CASE("gaussian profile properties") {
    CHECK(gaussian_profile(0.0) == 0.0);
    CHECK(gaussian_profile(1.0) == 0.0);
    CHECK(gaussian_profile(0.5) == doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-10));
    for (double v : {0.03, 0.2, 0.41, 0.77, 0.98})
        CHECK(gaussian_profile(v) == doctest::Approx(gaussian_profile(1.0 - v)).epsilon(1e-10));
    // U U'' = -1 (equivalently U'' = -1/U) on the interior
    for (double v = 0.1; v < 0.95; v += 0.1) {
        double h = 1e-5;
        double upp = (gaussian_profile(v + h) - 2.0 * gaussian_profile(v) +
                      gaussian_profile(v - h)) /
                     (h * h);
        CHECK(gaussian_profile(v) * upp == doctest::Approx(-1.0).epsilon(1e-6));
    }
    // Phi(Phi^{-1}(v)) = v
    for (double v : {1e-6, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-6}) {
        double z = inv_norm_cdf(v);
        CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK_THROWS_AS(inv_norm_cdf(0.0), ConfigError);
}

TEST_CASE("verdict resolution") {
    CHECK(resolve_verdict(1.0, 1.0, 0.0, 0.0) == Verdict::Pass);
    CHECK(resolve_verdict(0.5, 1.0, 0.0, 0.0) == Verdict::Pass);
    CHECK(resolve_verdict(1.05, 1.0, 0.01, 0.03) == Verdict::Inconclusive);  // 1.05 <= 1.06
    CHECK(resolve_verdict(1.07, 1.0, 0.01, 0.03) == Verdict::Fail);
    CHECK(to_string(Verdict::Pass) == "PASS");
    CHECK(to_string(Verdict::Fail) == "FAIL");
    CHECK(to_string(Verdict::Inconclusive) == "INCONCLUSIVE");
}

TEST_CASE("Gamma_2 closed form matches the finite-difference definition") {
    std::vector<ManifoldModel> models = {
        {Shape::disk(1.0), DriftSpec::zero()},
        {Shape::disk(1.0), DriftSpec::linear(0.7)},
        {Shape::annulus(0.5, 1.5), DriftSpec::linear(-0.4)},
        {Shape::half_line(), DriftSpec::linear(-1.0)},
    };
    for (const auto& m : models) {
        auto reg = default_registry(m);
        for (const auto& f : reg) {
            Vec x = m.dimension() == 2 ? Vec{0.61, 0.23} : Vec{0.61, 0.0};
            if (m.shape.kind == ShapeKind::Annulus) x = {0.75, 0.31};
            double gn2 = f.grad_norm2(x);
            if (gn2 < 1e-10) continue;
            auto [g2a, rhsa] = bochner_gamma2(m, f, x);
            auto [g2f, rhsf] = bochner_gamma2_fd(m, f, x);
            double scale = std::max({1.0, std::fabs(g2a), std::fabs(rhsa)});
            CHECK(std::fabs(g2a - g2f) <= 1e-6 * scale);
            CHECK(std::fabs(rhsa - rhsf) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("Gamma_2 analytic special cases") {
    ManifoldModel disk{Shape::disk(1.0), DriftSpec::zero()};
    // f = x^2 (radial2 has value |x|^2): Hess = 2I, Gamma_2 = |Hess|^2 = 8
    auto reg = default_registry(disk);
    const TestFunction* radial = nullptr;
    for (const auto& f : reg)
        if (f.id == "radial2") radial = &f;
    REQUIRE(radial != nullptr);
    auto [g2, rhs] = bochner_gamma2(disk, *radial, {0.3, 0.1});
    CHECK(g2 == doctest::Approx(8.0).epsilon(1e-12));
    // Cauchy-Schwarz makes the flat Bochner bound hold with K = 0
    CHECK(g2 >= rhs - 1e-12);

    // linear f on a zero-drift model: Gamma_2 = 0 and RHS = 0 (equality)
    const TestFunction* coord = nullptr;
    for (const auto& f : reg)
        if (f.id == "coordinate") coord = &f;
    REQUIRE(coord != nullptr);
    auto [g2l, rhsl] = bochner_gamma2(disk, *coord, {0.2, -0.4});
    CHECK(std::fabs(g2l) <= 1e-14);
    CHECK(std::fabs(rhsl) <= 1e-14);

    // degenerate gradient is rejected
    ManifoldModel line{Shape::half_line(), DriftSpec::zero()};
    auto line_reg = default_registry(line);
    const TestFunction* bump = nullptr;
    for (const auto& f : line_reg)
        if (f.id == "bump") bump = &f;
    REQUIRE(bump != nullptr);
    CHECK_THROWS_AS(bochner_gamma2(line, *bump, {0.0, 0.0}), DegenerateGradient);
}

TEST_CASE("constant f gives exact equalities in the suite") {
    ManifoldModel m{Shape::interval(0.0, 1.0), DriftSpec::zero()};
    TestFunction c = TestFunction::affine_positive(1, {0.5, 0.0}, 0.25, 0.0);  // identically 1
    CheckOptions opt = quick_opts();
    opt.sim.n_paths = 2000;
    auto reps = check_statement_suite({"S2", "S4", "S5"}, m, c, {0.5, 0.0}, 0.2, opt);
    for (const auto& r : reps) {
        CHECK(std::fabs(r.lhs) <= 1e-9);
        CHECK(r.verdict == Verdict::Pass);
    }
}

TEST_CASE("S5 RHS is exactly half of S4 RHS on a shared batch") {
    ManifoldModel m{Shape::disk(1.0), DriftSpec::zero()};
    auto reg = default_registry(m);
    CheckOptions opt = quick_opts();
    opt.sim.n_paths = 4000;
    auto reps = check_statement_suite({"S4", "S5"}, m, reg[0], {0.3, 0.2}, 0.1, opt);
    REQUIRE(reps.size() == 2);
    CHECK(reps[1].rhs == 0.5 * reps[0].rhs);  // bitwise: same estimand, same paths
}

TEST_CASE("S3 on the disk with f = x1: RHS is exactly 1 and dominates") {
    // sigma = 0, K = 0 and |grad f| = 1 everywhere, so the RHS is exactly
    // e^0 * P_t 1 * E e^0 = 1 while the LHS |grad P_t f|^2 decays below 1.
    ManifoldModel m{Shape::disk(1.0), DriftSpec::zero()};
    auto reg = default_registry(m);
    REQUIRE(reg[0].id == "coordinate");
    CheckOptions opt = quick_opts();
    auto r = check_statement("S3", m, reg[0], {0.0, 0.0}, 0.05, opt);
    CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.lhs > 0.9);
    CHECK(r.lhs < 1.0);
    CHECK(r.verdict == Verdict::Pass);
}

TEST_CASE("S2 and S3 hold on the half line with reflection") {
    // sigma = 0, K = 0: S2 reads |grad P_t f| <= E |f'(X_t)|, which is exact
    // equality for f = x (both sides are 2 Phi(x/sqrt(2t)) - 1 ... <= 1).
    ManifoldModel m{Shape::half_line(), DriftSpec::zero()};
    auto reg = default_registry(m);
    REQUIRE(reg[0].id == "coordinate");
    CheckOptions opt = quick_opts();
    for (const auto& r : check_statement_suite({"S2", "S3"}, m, reg[0], {0.4, 0.0}, 0.3, opt)) {
        CHECK(r.verdict != Verdict::Fail);
        CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-6));  // |f'| = 1 a.e.
    }
}

TEST_CASE("unknown statements and bad inputs raise ConfigError") {
    ManifoldModel m{Shape::disk(1.0), DriftSpec::zero()};
    auto reg = default_registry(m);
    CheckOptions opt = quick_opts();
    CHECK_THROWS_AS(check_statement("S1", m, reg[0], {0, 0}, 0.1, opt), ConfigError);
    CHECK_THROWS_AS(check_statement("S2", m, reg[0], {0, 0}, 0.0, opt), ConfigError);
    // S6 requires a positive f; the coordinate function is signed
    CHECK_THROWS_AS(check_statement("S6", m, reg[0], {0, 0}, 0.1, opt), ConfigError);
    CHECK_THROWS_AS(
        check_variable_bounds(m, reg[0], {0, 0}, 0.1, [](Vec) { return 0.0; },
                              [](Vec) { return 0.0; }, "G9", opt),
        ConfigError);
}

TEST_CASE("G2/G3 with constant fields reduce to the constant-bound forms") {
    // On the disk with zero drift: K1 = 0, K2 = sigma = 0 makes G2 coincide
    // with S2 at K = 0, sigma = 0.
    ManifoldModel m{Shape::disk(1.0), DriftSpec::zero()};
    auto reg = default_registry(m);
    CheckOptions opt = quick_opts();
    auto g2 = check_variable_bounds(m, reg[0], {0.2, 0.1}, 0.1, [](Vec) { return 0.0; },
                                    [](Vec) { return 0.0; }, "G2", opt);
    auto s2 = check_statement("S2", m, reg[0], {0.2, 0.1}, 0.1, opt);
    CHECK(g2.rhs == doctest::Approx(s2.rhs).epsilon(1e-12));  // identical batch + weights
    CHECK(g2.lhs == doctest::Approx(s2.lhs).epsilon(1e-12));
    CHECK(g2.verdict != Verdict::Fail);
    auto g3 = check_variable_bounds(m, reg[0], {0.2, 0.1}, 0.1, [](Vec) { return 0.0; },
                                    [](Vec) { return 0.0; }, "G3", opt);
    CHECK(g3.verdict != Verdict::Fail);
    CHECK(g3.lhs == doctest::Approx(s2.lhs * s2.lhs).epsilon(1e-12));
}

TEST_CASE("second-fundamental-form estimate: conventions and validation") {
    CheckOptions opt = quick_opts();
    // 1D shapes: no tangent space on the boundary, II = 0 by convention
    ManifoldModel line{Shape::interval(0.0, 1.0), DriftSpec::zero()};
    auto ii = estimate_ii(line, {0.0, 0.0}, {0.0, 1.0}, 2.0, {0.04, 0.02, 0.01, 0.005}, opt);
    CHECK(ii.value == 0.0);
    CHECK(ii.t_list.empty());
    // fewer than 4 times is rejected
    ManifoldModel disk{Shape::disk(1.0), DriftSpec::zero()};
    CHECK_THROWS_AS(estimate_ii(disk, {1.0, 0.0}, {0.0, 1.0}, 2.0, {0.04, 0.02}, opt),
                    ConfigError);
    CHECK_THROWS_AS(estimate_ii(disk, {1.0, 0.0}, {0.0, 0.0}, 2.0, {0.04, 0.02, 0.01, 0.005}, opt),
                    ConfigError);
}

TEST_CASE("II scales like |v|^2 through the probe amplitude") {
    // II(v,v) for the unit disk is |v|^2 / R; with the raw(t) prefactor built
    // from |grad f|^2 = |v|^2, raw values for amplitude 2 are 4x amplitude 1.
    ManifoldModel disk{Shape::disk(1.0), DriftSpec::zero()};
    CheckOptions opt = quick_opts();
    opt.sim.n_paths = 8000;
    std::vector<double> ts{0.04, 0.02, 0.01, 0.005};
    auto one = estimate_ii(disk, {1.0, 0.0}, {0.0, 1.0}, 2.0, ts, opt);
    auto two = estimate_ii(disk, {1.0, 0.0}, {0.0, 2.0}, 2.0, ts, opt);
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(two.raw[i] == doctest::Approx(4.0 * one.raw[i]).epsilon(1e-9));
    CHECK(two.value == doctest::Approx(4.0 * one.value).epsilon(1e-9));
}

TEST_CASE("Levy-Gromov: t = 0 and constant f are exact") {
    ManifoldModel m{Shape::half_line(), DriftSpec::linear(-1.0)};
    auto reg = default_registry(m);
    const TestFunction* sind = nullptr;
    for (const auto& f : reg)
        if (f.id == "sindicator") sind = &f;
    REQUIRE(sind != nullptr);
    CheckOptions opt = quick_opts();
    opt.sim.n_paths = 2000;
    // t = 0: both sides equal U(f(x)) exactly
    auto r0 = check_levy_gromov(m, *sind, {0.7, 0.0}, 0.0, opt);
    CHECK(r0.lhs == doctest::Approx(gaussian_profile(sind->value({0.7, 0.0}))).epsilon(1e-12));
    CHECK(r0.rhs == doctest::Approx(r0.lhs).epsilon(1e-12));
    CHECK(r0.verdict == Verdict::Pass);
    // positive time: the bound holds
    auto r1 = check_levy_gromov(m, *sind, {0.7, 0.0}, 0.5, opt);
    CHECK(r1.verdict != Verdict::Fail);
}

TEST_CASE("Levy-Gromov stationary comparison needs K < 0 and sigma = 0") {
    CheckOptions opt = quick_opts();
    opt.sim.n_paths = 2000;
    ManifoldModel bad{Shape::half_line(), DriftSpec::zero()};  // K = 0
    auto reg = default_registry(bad);
    double dummy = 0.0;
    CHECK_THROWS_AS(check_levy_gromov(bad, reg[0], {0.5, 0.0}, 0.2, opt, &dummy), ConfigError);

    // On the halfline with Z = -x the invariant law is half-normal; for large
    // t the MC RHS approaches the stationary quadrature value.
    ManifoldModel m{Shape::half_line(), DriftSpec::linear(-1.0)};
    auto mreg = default_registry(m);
    const TestFunction* sind = nullptr;
    for (const auto& f : mreg)
        if (f.id == "sindicator") sind = &f;
    REQUIRE(sind != nullptr);
    CheckOptions big = quick_opts();
    big.sim.n_paths = 20000;
    big.sim.dt = 1e-3;
    double stat = 0.0;
    auto r = check_levy_gromov(m, *sind, {0.5, 0.0}, 6.0, big, &stat);
    CHECK(stat > 0.0);
    CHECK(r.rhs == doctest::Approx(stat).epsilon(0.05));
}

TEST_CASE("submartingale diagnostic is monotone for a smooth profile") {
    ManifoldModel m{Shape::half_line(), DriftSpec::linear(-1.0)};
    auto reg = default_registry(m);
    const TestFunction* sind = nullptr;
    for (const auto& f : reg)
        if (f.id == "sindicator") sind = &f;
    REQUIRE(sind != nullptr);
    CheckOptions opt = quick_opts();
    opt.sim.dt = 1e-3;
    opt.sim.n_paths = 8000;
    auto rep = submartingale_diagnostic(m, *sind, {0.5, 0.0}, 1.0,
                                        {0.0, 0.25, 0.5, 0.75, 1.0}, opt);
    REQUIRE(rep.values.size() == 5);
    CHECK(rep.monotone);
    // s = 0 value is deterministic up to round-off in the moment sums
    CHECK(rep.ses[0] <= 1e-7);
    // validation
    CHECK_THROWS_AS(submartingale_diagnostic(m, *sind, {0.5, 0.0}, 1.0, {0.5, 0.25}, opt),
                    ConfigError);
}
