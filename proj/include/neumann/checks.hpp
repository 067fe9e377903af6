#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neumann/geometry.hpp"
#include "neumann/pde.hpp"
#include "neumann/semigroup.hpp"

namespace neumann {

// The three constants of the dimension-free estimates:
//   c_exp = (e^{2Kt}-1)/K, c_ls = 2K/(1-e^{-2Kt}), c_p = 2K^2/(1-e^{-2Kt})^2
// with the exact K->0 limits (2t, 1/t, 1/(2t^2)) used when |K| t < 1e-8.
struct KConsts {
    double c_exp;
    double c_ls;
    double c_p;
};
KConsts kconst(double K, double t);

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

// One inequality evaluation. slack budget = 3*se + margin;
//   PASS          lhs <= rhs (+ round-off tolerance)
//   INCONCLUSIVE  rhs < lhs <= rhs + slack (cannot distinguish from noise)
//   FAIL          lhs > rhs + slack
struct InequalityReport {
    std::string statement;  // S2..S7, G2, G3, LG43, LG41
    std::string model;
    std::string f;
    Vec x;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;      // propagated Monte Carlo standard error of rhs (and lhs when MC)
    double margin = 0.0;  // deterministic discretization margin = margin_dt + margin_h
    double margin_dt = 0.0;  // time-discretization (local-time bias) part
    double margin_h = 0.0;   // grid / round-off part
    Verdict verdict = Verdict::Inconclusive;
};

Verdict resolve_verdict(double lhs, double rhs, double se, double margin);

struct CheckOptions {
    SimParams sim{1e-4, 100000, 1};
    PdeParams pde{};
    std::optional<double> K_override;      // negative controls
    std::optional<double> sigma_override;  // negative controls
    bool use_pde = true;                   // LHS route; false forces grad_pt
};

// Theorem-style pointwise checks; stmt in {S2,...,S7}. Plain P_t factors on
// the LHS come from the PDE oracle; every local-time-weighted expectation is
// Monte Carlo on one shared path batch.
InequalityReport check_statement(const std::string& stmt, const ManifoldModel& model,
                                 const TestFunction& f, Vec x, double t,
                                 const CheckOptions& opt);

// Same (model, f, x, t) across several statements, sharing the path batch and
// the solved fields. Guarantees rhs(S5) = rhs(S4)/2 exactly.
std::vector<InequalityReport> check_statement_suite(const std::vector<std::string>& stmts,
                                                    const ManifoldModel& model,
                                                    const TestFunction& f, Vec x, double t,
                                                    const CheckOptions& opt);

// Variable-bound forms with position-dependent K1 (curvature) and K2
// (boundary) fields; which in {G2, G3}.
InequalityReport check_variable_bounds(const ManifoldModel& model, const TestFunction& f, Vec x,
                                       double t, const ScalarField& K1, const ScalarField& K2,
                                       const std::string& which, const CheckOptions& opt);

// Second-fundamental-form extraction from the small-time gradient ratio:
//   raw(t) = (sqrt(pi) |grad f|^2 / 2) (1/sqrt(t)) log((P_t|grad f|^p)^{1/p} / |grad P_t f|)
// extrapolated to t=0 by a linear fit in sqrt(t).
struct IIEstimate {
    Vec x;
    Vec v;
    double p = 2.0;
    std::vector<double> t_list;
    std::vector<double> raw;
    double value = 0.0;     // extrapolated II(v,v)
    double slope = 0.0;     // sqrt(t) coefficient of the fit
    double residual = 0.0;  // rms fit residual
};
IIEstimate estimate_ii(const ManifoldModel& model, Vec x, Vec v, double p,
                       const std::vector<double>& t_list, const CheckOptions& opt);

// (Gamma_2(f,f)(x), RHS of the pointwise Bochner bound) from closed-form
// derivatives, and the nested-finite-difference oracle for the same pair.
std::pair<double, double> bochner_gamma2(const ManifoldModel& model, const TestFunction& f, Vec x);
std::pair<double, double> bochner_gamma2_fd(const ManifoldModel& model, const TestFunction& f,
                                            Vec x);

// Gaussian isoperimetric profile U = phi o Phi^{-1} (standard normal).
double gaussian_profile(double v);
double inv_norm_cdf(double v);  // Phi^{-1}, |Phi(Phi^{-1}(v)) - v| <= 1e-12

// Theorem 4.1 check. If rhs_stationary is non-null it also receives the
// stationary-limit RHS (quadrature against the invariant measure, R = -K),
// which requires K < 0 and sigma = 0.
InequalityReport check_levy_gromov(const ManifoldModel& model, const TestFunction& f, Vec x,
                                   double t, const CheckOptions& opt,
                                   double* rhs_stationary = nullptr);

// E[eta_s^{1/2}] along an s-grid; monotone says every consecutive pair is
// nondecreasing within 3 combined SE.
struct SubmartingaleReport {
    std::vector<double> s_grid;
    std::vector<double> values;
    std::vector<double> ses;
    bool monotone = false;
};
SubmartingaleReport submartingale_diagnostic(const ManifoldModel& model, const TestFunction& f,
                                             Vec x, double t, const std::vector<double>& s_grid,
                                             const CheckOptions& opt);

}  // namespace neumann
