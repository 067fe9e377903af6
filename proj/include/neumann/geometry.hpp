#pragma once

#include <optional>
#include <string>

#include "neumann/common.hpp"

namespace neumann {

enum class ShapeKind { HalfLine, Interval, Disk, Annulus, Rectangle };

struct Shape {
    ShapeKind kind = ShapeKind::HalfLine;
    double a = 0.0;  // Interval: left end; Annulus: r_in; Rectangle: width
    double b = 0.0;  // Interval: right end; Disk: R; Annulus: r_out; Rectangle: height

    static Shape half_line() { return {ShapeKind::HalfLine, 0.0, 0.0}; }
    static Shape interval(double lo, double hi);
    static Shape disk(double radius);
    static Shape annulus(double r_in, double r_out);
    static Shape rectangle(double w, double h);

    int dimension() const {
        return (kind == ShapeKind::HalfLine || kind == ShapeKind::Interval) ? 1 : 2;
    }
    // Finite reference length used for boundary tolerances; the half-line
    // gets a nominal unit scale.
    double diameter() const;
    std::string name() const;
};

enum class DriftKind { Zero, Linear, GradientPotential };

struct DriftSpec {
    DriftKind kind = DriftKind::Zero;
    double coeff = 0.0;         // Linear: Z(x) = coeff * x
    std::string potential;      // GradientPotential: registered id ("quadratic")
    double potential_param = 0.0;

    static DriftSpec zero() { return {}; }
    static DriftSpec linear(double a) { return {DriftKind::Linear, a, "", 0.0}; }
    static DriftSpec gradient_potential(const std::string& id, double param) {
        return {DriftKind::GradientPotential, 0.0, id, param};
    }
};

struct ManifoldModel {
    Shape shape;
    DriftSpec drift;

    int dimension() const { return shape.dimension(); }
    std::string id() const;
};

struct CurvatureBounds {
    double K = 0.0;      // Ric - grad Z >= -K on M
    double sigma = 0.0;  // II >= -sigma on dM
};

// Distance to the boundary, positive inside, negative outside.
double signed_distance(const ManifoldModel& model, Vec x);

// Unit inward normal at a boundary point (|signed_distance| <= eps_proj).
// Throws RectangleCorner within eps_proj of a rectangle corner.
Vec inward_normal(const ManifoldModel& model, Vec x);

// II(v,v) = -<grad_v N, v> for v tangent to the boundary at x. The tangent
// space of a 1D boundary point is trivial, so 1D shapes return 0.
double second_fundamental_form(const ManifoldModel& model, Vec x, Vec v);

// Tightest constants (K, sigma) for the model. Throws UnsupportedDrift for
// potentials without a registered closed-form Hessian bound.
CurvatureBounds curvature_bounds(const ManifoldModel& model);

Vec drift_eval(const ManifoldModel& model, Vec x);

struct Projection {
    Vec point;
    double dist = 0.0;
};

// Nearest-point projection onto the closure of the domain. Throws
// ProjectionFailure when the projection is ambiguous (step jumped past the
// medial axis of the annulus).
Projection project_to_closure(const ManifoldModel& model, Vec y);

// Drift potential value V with Z = grad V, for models whose drift is a
// gradient (Zero and Linear qualify: V = coeff*|x|^2/2). Used by the
// stationary-measure quadrature and the PDE solver's weighted fluxes.
double drift_potential(const ManifoldModel& model, Vec x);

}  // namespace neumann
