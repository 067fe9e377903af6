#include "neumann/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace neumann {

Shape Shape::interval(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("Interval requires a < b");
    return {ShapeKind::Interval, lo, hi};
}
Shape Shape::disk(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("Disk requires R > 0");
    return {ShapeKind::Disk, 0.0, radius};
}
Shape Shape::annulus(double r_in, double r_out) {
    if (!(0.0 < r_in && r_in < r_out)) throw std::invalid_argument("Annulus requires 0 < r_in < r_out");
    return {ShapeKind::Annulus, r_in, r_out};
}
Shape Shape::rectangle(double w, double h) {
    if (!(w > 0.0 && h > 0.0)) throw std::invalid_argument("Rectangle requires w,h > 0");
    return {ShapeKind::Rectangle, w, h};
}

double Shape::diameter() const {
    switch (kind) {
        case ShapeKind::HalfLine: return 1.0;
        case ShapeKind::Interval: return b - a;
        case ShapeKind::Disk: return 2.0 * b;
        case ShapeKind::Annulus: return 2.0 * b;
        case ShapeKind::Rectangle: return std::hypot(a, b);
    }
    return 1.0;
}

std::string Shape::name() const {
    std::ostringstream os;
    switch (kind) {
        case ShapeKind::HalfLine: os << "halfline"; break;
        case ShapeKind::Interval: os << "interval(" << a << "," << b << ")"; break;
        case ShapeKind::Disk: os << "disk(" << b << ")"; break;
        case ShapeKind::Annulus: os << "annulus(" << a << "," << b << ")"; break;
        case ShapeKind::Rectangle: os << "rectangle(" << a << "," << b << ")"; break;
    }
    return os.str();
}

std::string ManifoldModel::id() const {
    std::ostringstream os;
    os << shape.name() << "/";
    switch (drift.kind) {
        case DriftKind::Zero: os << "zero"; break;
        case DriftKind::Linear: os << "linear(" << drift.coeff << ")"; break;
        case DriftKind::GradientPotential:
            os << "potential(" << drift.potential << "," << drift.potential_param << ")";
            break;
    }
    return os.str();
}

double signed_distance(const ManifoldModel& model, Vec x) {
    const Shape& s = model.shape;
    switch (s.kind) {
        case ShapeKind::HalfLine:
            return x.x;
        case ShapeKind::Interval:
            return std::min(x.x - s.a, s.b - x.x);
        case ShapeKind::Disk:
            return s.b - x.norm();
        case ShapeKind::Annulus: {
            double r = x.norm();
            return std::min(r - s.a, s.b - r);
        }
        case ShapeKind::Rectangle:
            return std::min(std::min(x.x, s.a - x.x), std::min(x.y, s.b - x.y));
    }
    return 0.0;
}

namespace {

bool near_rectangle_corner(const Shape& s, Vec x) {
    double dx = std::min(std::fabs(x.x), std::fabs(x.x - s.a));
    double dy = std::min(std::fabs(x.y), std::fabs(x.y - s.b));
    return dx <= k_eps_proj && dy <= k_eps_proj;
}

}  // namespace

Vec inward_normal(const ManifoldModel& model, Vec x) {
    const Shape& s = model.shape;
    switch (s.kind) {
        case ShapeKind::HalfLine:
            return {1.0, 0.0};
        case ShapeKind::Interval:
            return (x.x - s.a <= s.b - x.x) ? Vec{1.0, 0.0} : Vec{-1.0, 0.0};
        case ShapeKind::Disk: {
            double r = x.norm();
            return {-x.x / r, -x.y / r};
        }
        case ShapeKind::Annulus: {
            double r = x.norm();
            if (r - s.a <= s.b - r) return {x.x / r, x.y / r};   // inner circle
            return {-x.x / r, -x.y / r};                         // outer circle
        }
        case ShapeKind::Rectangle: {
            if (near_rectangle_corner(s, x))
                throw RectangleCorner("inward_normal: corner neighborhood excluded");
            double d_left = x.x, d_right = s.a - x.x, d_bot = x.y, d_top = s.b - x.y;
            double m = std::min(std::min(d_left, d_right), std::min(d_bot, d_top));
            if (m == d_left) return {1.0, 0.0};
            if (m == d_right) return {-1.0, 0.0};
            if (m == d_bot) return {0.0, 1.0};
            return {0.0, -1.0};
        }
    }
    return {1.0, 0.0};
}

double second_fundamental_form(const ManifoldModel& model, Vec x, Vec v) {
    const Shape& s = model.shape;
    switch (s.kind) {
        case ShapeKind::HalfLine:
        case ShapeKind::Interval:
            return 0.0;  // trivial tangent space
        case ShapeKind::Disk:
            // N = -x/|x|: II(v,v) = -<grad_v N, v> = |v|^2 / R
            return v.norm2() / s.b;
        case ShapeKind::Annulus: {
            double r = x.norm();
            if (r - s.a <= s.b - r) return -v.norm2() / s.a;  // inner circle, N radial outward
            return v.norm2() / s.b;
        }
        case ShapeKind::Rectangle:
            if (near_rectangle_corner(s, x))
                throw RectangleCorner("second_fundamental_form: corner neighborhood excluded");
            return 0.0;  // straight edges
    }
    return 0.0;
}

CurvatureBounds curvature_bounds(const ManifoldModel& model) {
    CurvatureBounds cb;
    switch (model.drift.kind) {
        case DriftKind::Zero:
            cb.K = 0.0;
            break;
        case DriftKind::Linear:
            // grad Z = a*Id, Ric = 0 on flat domains: Ric - grad Z = -a*Id.
            cb.K = model.drift.coeff;
            break;
        case DriftKind::GradientPotential:
            if (model.drift.potential == "quadratic")
                cb.K = model.drift.potential_param;  // Hess V = c*Id
            else
                throw UnsupportedDrift("no registered Hessian bound for potential '" +
                                       model.drift.potential + "'");
            break;
    }
    switch (model.shape.kind) {
        case ShapeKind::Annulus:
            cb.sigma = 1.0 / model.shape.a;  // inner circle has II = -1/r_in
            break;
        default:
            cb.sigma = 0.0;  // convex boundaries
            break;
    }
    return cb;
}

Vec drift_eval(const ManifoldModel& model, Vec x) {
    switch (model.drift.kind) {
        case DriftKind::Zero:
            return {0.0, 0.0};
        case DriftKind::Linear:
            return x * model.drift.coeff;
        case DriftKind::GradientPotential:
            if (model.drift.potential == "quadratic") return x * model.drift.potential_param;
            throw UnsupportedDrift("unknown potential '" + model.drift.potential + "'");
    }
    return {0.0, 0.0};
}

double drift_potential(const ManifoldModel& model, Vec x) {
    switch (model.drift.kind) {
        case DriftKind::Zero:
            return 0.0;
        case DriftKind::Linear:
            return 0.5 * model.drift.coeff * x.norm2();
        case DriftKind::GradientPotential:
            if (model.drift.potential == "quadratic")
                return 0.5 * model.drift.potential_param * x.norm2();
            throw UnsupportedDrift("unknown potential '" + model.drift.potential + "'");
    }
    return 0.0;
}

Projection project_to_closure(const ManifoldModel& model, Vec y) {
    const Shape& s = model.shape;
    switch (s.kind) {
        case ShapeKind::HalfLine:
            if (y.x >= 0.0) return {y, 0.0};
            return {{0.0, 0.0}, -y.x};
        case ShapeKind::Interval: {
            double c = std::clamp(y.x, s.a, s.b);
            return {{c, 0.0}, std::fabs(y.x - c)};
        }
        case ShapeKind::Disk: {
            double r = y.norm();
            if (r <= s.b) return {y, 0.0};
            double f = s.b / r;
            return {{y.x * f, y.y * f}, r - s.b};
        }
        case ShapeKind::Annulus: {
            double r = y.norm();
            if (r >= s.a && r <= s.b) return {y, 0.0};
            if (r > s.b) {
                double f = s.b / r;
                return {{y.x * f, y.y * f}, r - s.b};
            }
            // inside the hole: ambiguous past the medial axis
            if (s.a - r > 0.5 * s.a || r == 0.0)
                throw ProjectionFailure("projection past annulus medial axis; dt too large");
            double f = s.a / r;
            return {{y.x * f, y.y * f}, s.a - r};
        }
        case ShapeKind::Rectangle: {
            Vec c{std::clamp(y.x, 0.0, s.a), std::clamp(y.y, 0.0, s.b)};
            return {c, (y - c).norm()};
        }
    }
    return {y, 0.0};
}

}  // namespace neumann
