#include "neumann/test_functions.hpp"

#include <cmath>

namespace neumann {

namespace {

// Quintic bump profile g(s) = (1-s)^5 on s < 1, zero outside. C^4 at the
// support edge, so third derivatives of f are continuous.
struct BumpProfile {
    double g = 0, g1 = 0, g2 = 0, g3 = 0;
    explicit BumpProfile(double s) {
        if (s < 1.0) {
            double u = 1.0 - s;
            double u2 = u * u;
            g = u2 * u2 * u;
            g1 = -5.0 * u2 * u2;
            g2 = 20.0 * u2 * u;
            g3 = -60.0 * u2;
        }
    }
};

struct Logistic {
    double s0, s1, s2, s3;
    explicit Logistic(double z) {
        s0 = 1.0 / (1.0 + std::exp(-z));
        s1 = s0 * (1.0 - s0);
        s2 = s1 * (1.0 - 2.0 * s0);
        s3 = s2 * (1.0 - 2.0 * s0) - 2.0 * s1 * s1;
    }
};

inline double comp(Vec v, int i) { return i == 0 ? v.x : v.y; }

}  // namespace

double TestFunction::value(Vec x) const {
    switch (kind) {
        case Kind::Coordinate:
            return x.x;
        case Kind::RadialPoly:
            return dim == 1 ? x.x * x.x : x.norm2();
        case Kind::Bump: {
            Vec d = x - center;
            double s = (dim == 1 ? d.x * d.x : d.norm2()) / (width * width);
            return BumpProfile(s).g;
        }
        case Kind::AffinePositive: {
            TestFunction inner = *this;
            inner.kind = Kind::Bump;
            return 1.0 + eps * inner.value(x);
        }
        case Kind::SmoothedIndicator:
            return Logistic((x.x - center.x) / width).s0;
        case Kind::AngularTangent: {
            double u = x.norm2();
            return x.y * (q0 + q1 * u + q2 * u * u);
        }
    }
    return 0.0;
}

Vec TestFunction::grad(Vec x) const {
    switch (kind) {
        case Kind::Coordinate:
            return {1.0, 0.0};
        case Kind::RadialPoly:
            return dim == 1 ? Vec{2.0 * x.x, 0.0} : Vec{2.0 * x.x, 2.0 * x.y};
        case Kind::Bump: {
            Vec d = x - center;
            if (dim == 1) d.y = 0.0;
            double w2 = width * width;
            double s = d.norm2() / w2;
            BumpProfile p(s);
            return d * (2.0 * p.g1 / w2);
        }
        case Kind::AffinePositive: {
            TestFunction inner = *this;
            inner.kind = Kind::Bump;
            return inner.grad(x) * eps;
        }
        case Kind::SmoothedIndicator:
            return {Logistic((x.x - center.x) / width).s1 / width, 0.0};
        case Kind::AngularTangent: {
            double u = x.norm2();
            double Q = q0 + q1 * u + q2 * u * u;
            double Qp = q1 + 2.0 * q2 * u;
            return {x.y * Qp * 2.0 * x.x, Q + x.y * Qp * 2.0 * x.y};
        }
    }
    return {};
}

void TestFunction::hess(Vec x, double h[3]) const {
    h[0] = h[1] = h[2] = 0.0;
    switch (kind) {
        case Kind::Coordinate:
            return;
        case Kind::RadialPoly:
            h[0] = 2.0;
            h[2] = dim == 1 ? 0.0 : 2.0;
            return;
        case Kind::Bump: {
            Vec d = x - center;
            if (dim == 1) d.y = 0.0;
            double w2 = width * width;
            double s = d.norm2() / w2;
            BumpProfile p(s);
            double sx = 2.0 * d.x / w2, sy = 2.0 * d.y / w2, sdd = 2.0 / w2;
            h[0] = p.g2 * sx * sx + p.g1 * sdd;
            h[1] = p.g2 * sx * sy;
            h[2] = dim == 1 ? 0.0 : p.g2 * sy * sy + p.g1 * sdd;
            return;
        }
        case Kind::AffinePositive: {
            TestFunction inner = *this;
            inner.kind = Kind::Bump;
            inner.hess(x, h);
            h[0] *= eps;
            h[1] *= eps;
            h[2] *= eps;
            return;
        }
        case Kind::SmoothedIndicator:
            h[0] = Logistic((x.x - center.x) / width).s2 / (width * width);
            return;
        case Kind::AngularTangent: {
            double u = x.norm2();
            double Qp = q1 + 2.0 * q2 * u;
            double Qpp = 2.0 * q2;
            double ux = 2.0 * x.x, uy = 2.0 * x.y;
            h[0] = x.y * (Qpp * ux * ux + 2.0 * Qp);
            h[1] = Qp * ux + x.y * Qpp * ux * uy;
            h[2] = 2.0 * Qp * uy + x.y * (Qpp * uy * uy + 2.0 * Qp);
            return;
        }
    }
}

double TestFunction::third(Vec x, int i, int j, int k) const {
    switch (kind) {
        case Kind::Coordinate:
        case Kind::RadialPoly:
            return 0.0;
        case Kind::Bump: {
            Vec d = x - center;
            if (dim == 1) d.y = 0.0;
            double w2 = width * width;
            double s = d.norm2() / w2;
            BumpProfile p(s);
            double sd[2] = {2.0 * d.x / w2, dim == 1 ? 0.0 : 2.0 * d.y / w2};
            double sdd = 2.0 / w2;
            auto dij = [](int a, int b) { return a == b ? 1.0 : 0.0; };
            double sij = dij(i, j) * sdd, sik = dij(i, k) * sdd, sjk = dij(j, k) * sdd;
            if (dim == 1 && (i == 1 || j == 1 || k == 1)) return 0.0;
            return p.g3 * sd[i] * sd[j] * sd[k] +
                   p.g2 * (sij * sd[k] + sik * sd[j] + sjk * sd[i]);
        }
        case Kind::AffinePositive: {
            TestFunction inner = *this;
            inner.kind = Kind::Bump;
            return eps * inner.third(x, i, j, k);
        }
        case Kind::SmoothedIndicator:
            if (i == 0 && j == 0 && k == 0)
                return Logistic((x.x - center.x) / width).s3 / (width * width * width);
            return 0.0;
        case Kind::AngularTangent: {
            double u = x.norm2();
            double Qp = q1 + 2.0 * q2 * u;
            double Qpp = 2.0 * q2;
            double ud[2] = {2.0 * x.x, 2.0 * x.y};
            auto dij = [](int a, int b) { return a == b ? 1.0 : 0.0; };
            auto dy = [](int a) { return a == 1 ? 1.0 : 0.0; };
            double t = dy(i) * (Qpp * ud[j] * ud[k] + 2.0 * Qp * dij(j, k)) +
                       dy(j) * (Qpp * ud[i] * ud[k] + 2.0 * Qp * dij(i, k)) +
                       dy(k) * (Qpp * ud[i] * ud[j] + 2.0 * Qp * dij(i, j));
            // Q''' = 0 for quadratic Q
            t += x.y * 2.0 * Qpp * (dij(i, j) * ud[k] + dij(i, k) * ud[j] + dij(j, k) * ud[i]);
            return t;
        }
    }
    return 0.0;
}

TestFunction TestFunction::coordinate(int dim) {
    TestFunction f;
    f.id = "coordinate";
    f.kind = Kind::Coordinate;
    f.dim = dim;
    return f;
}

TestFunction TestFunction::radial_poly(int dim) {
    TestFunction f;
    f.id = "radial2";
    f.kind = Kind::RadialPoly;
    f.dim = dim;
    return f;
}

TestFunction TestFunction::bump(int dim, Vec center, double width) {
    TestFunction f;
    f.id = "bump";
    f.kind = Kind::Bump;
    f.dim = dim;
    f.center = center;
    f.width = width;
    f.range01 = true;
    return f;
}

TestFunction TestFunction::affine_positive(int dim, Vec center, double width, double eps) {
    TestFunction f = bump(dim, center, width);
    f.id = "affine";
    f.kind = Kind::AffinePositive;
    f.eps = eps;
    f.positive = true;
    f.range01 = false;
    return f;
}

TestFunction TestFunction::smoothed_indicator(int dim, double center_x, double width) {
    TestFunction f;
    f.id = "sindicator";
    f.kind = Kind::SmoothedIndicator;
    f.dim = dim;
    f.center = {center_x, 0.0};
    f.width = width;
    f.positive = true;
    f.range01 = true;
    return f;
}

TestFunction TestFunction::angular_tangent_disk(double radius, double amplitude) {
    TestFunction f;
    f.id = "angular";
    f.kind = Kind::AngularTangent;
    f.dim = 2;
    // Q(u) = A*(3R^2 - u)/(2R^2): Neumann on r=R, |grad f| = A at the boundary.
    f.q0 = 1.5 * amplitude;
    f.q1 = -amplitude / (2.0 * radius * radius);
    f.q2 = 0.0;
    return f;
}

TestFunction TestFunction::angular_tangent_annulus(double r_in, double r_out, double amplitude) {
    TestFunction f;
    f.id = "angular";
    f.kind = Kind::AngularTangent;
    f.dim = 2;
    // Q + 2uQ' = C(u-u_in)(u-u_out) vanishes on both circles; scale so that
    // |grad f| = Q(u_in) = amplitude on the inner circle.
    double ui = r_in * r_in, uo = r_out * r_out;
    double q_at_ui = ui * uo - (ui + uo) * ui / 3.0 + ui * ui / 5.0;
    double c = amplitude / q_at_ui;
    f.q0 = c * ui * uo;
    f.q1 = -c * (ui + uo) / 3.0;
    f.q2 = c / 5.0;
    return f;
}

std::vector<TestFunction> default_registry(const ManifoldModel& model) {
    std::vector<TestFunction> fs;
    const Shape& s = model.shape;
    int d = model.dimension();
    fs.push_back(TestFunction::coordinate(d));
    fs.push_back(TestFunction::radial_poly(d));
    switch (s.kind) {
        case ShapeKind::HalfLine:
            fs.push_back(TestFunction::bump(1, {0.5, 0.0}, 0.5));
            fs.push_back(TestFunction::affine_positive(1, {0.5, 0.0}, 0.5, 0.5));
            fs.push_back(TestFunction::smoothed_indicator(1, 0.5, 0.25));
            break;
        case ShapeKind::Interval: {
            double mid = 0.5 * (s.a + s.b), half = 0.5 * (s.b - s.a);
            fs.push_back(TestFunction::bump(1, {mid, 0.0}, half));
            fs.push_back(TestFunction::affine_positive(1, {mid, 0.0}, half, 0.5));
            fs.push_back(TestFunction::smoothed_indicator(1, mid, 0.25 * half));
            break;
        }
        case ShapeKind::Disk:
            fs.push_back(TestFunction::bump(2, {0.0, 0.0}, 0.8 * s.b));
            fs.push_back(TestFunction::affine_positive(2, {0.0, 0.0}, 0.8 * s.b, 0.5));
            fs.push_back(TestFunction::smoothed_indicator(2, 0.0, 0.3 * s.b));
            fs.push_back(TestFunction::angular_tangent_disk(s.b, 1.0));
            break;
        case ShapeKind::Annulus: {
            double mid = 0.5 * (s.a + s.b), half = 0.5 * (s.b - s.a);
            fs.push_back(TestFunction::bump(2, {mid, 0.0}, half));
            fs.push_back(TestFunction::affine_positive(2, {mid, 0.0}, half, 0.5));
            fs.push_back(TestFunction::smoothed_indicator(2, 0.0, 0.3 * half));
            fs.push_back(TestFunction::angular_tangent_annulus(s.a, s.b, 1.0));
            break;
        }
        case ShapeKind::Rectangle: {
            Vec mid{0.5 * s.a, 0.5 * s.b};
            double half = 0.5 * std::min(s.a, s.b);
            fs.push_back(TestFunction::bump(2, mid, half));
            fs.push_back(TestFunction::affine_positive(2, mid, half, 0.5));
            fs.push_back(TestFunction::smoothed_indicator(2, mid.x, 0.25 * half));
            break;
        }
    }
    return fs;
}

TestFunction tangential_probe(const ManifoldModel& model, double amplitude) {
    switch (model.shape.kind) {
        case ShapeKind::Disk:
            return TestFunction::angular_tangent_disk(model.shape.b, amplitude);
        case ShapeKind::Annulus:
            return TestFunction::angular_tangent_annulus(model.shape.a, model.shape.b, amplitude);
        default:
            throw UnsupportedShape("tangential probe only defined for disk/annulus");
    }
}

}  // namespace neumann
