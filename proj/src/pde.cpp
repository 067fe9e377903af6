#include "neumann/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "neumann/sde.hpp"  // linear_drift_coeff

namespace neumann {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Conservative 1D operator on a cell-centered grid:
//   (L u)_j = (w_{j+1/2}(u_{j+1}-u_j) - w_{j-1/2}(u_j-u_{j-1})) / (w_j dr^2) - q_j u_j
// Boundary faces carry zero weight, which is the Neumann (zero flux) closure
// and conserves sum_j w_j u_j dr exactly.
//
// Weights are passed as logarithms and only the face/cell *ratios* are
// exponentiated: on an unbounded shape (truncated half line with outward
// drift) the absolute weights e^V overflow long before the ratios, which stay
// O(exp(V' dr)). A -inf log-weight encodes the zero-flux boundary face.
struct Operator1D {
    std::vector<double> lower, diag, upper;
    int n = 0;

    void build(int n_cells, double dr, const std::vector<double>& logwface,
               const std::vector<double>& logwcell, const std::vector<double>& q) {
        n = n_cells;
        lower.assign(n, 0.0);
        diag.assign(n, 0.0);
        upper.assign(n, 0.0);
        double inv = 1.0 / (dr * dr);
        for (int j = 0; j < n; ++j) {
            double lo = std::exp(logwface[j] - logwcell[j]) * inv;
            double up = std::exp(logwface[j + 1] - logwcell[j]) * inv;
            lower[j] = lo;
            upper[j] = up;
            diag[j] = -(lo + up) - (q.empty() ? 0.0 : q[j]);
        }
    }

    void apply(const double* u, double* out) const {
        for (int j = 0; j < n; ++j) {
            double s = diag[j] * u[j];
            if (j > 0) s += lower[j] * u[j - 1];
            if (j + 1 < n) s += upper[j] * u[j + 1];
            out[j] = s;
        }
    }

    // Solve (I - g L) x = rhs in place (Thomas algorithm).
    void solve_shifted(double g, const double* rhs, double* x, std::vector<double>& cp,
                       std::vector<double>& dp) const {
        cp.resize(n);
        dp.resize(n);
        double b0 = 1.0 - g * diag[0];
        cp[0] = -g * upper[0] / b0;
        dp[0] = rhs[0] / b0;
        for (int j = 1; j < n; ++j) {
            double a = -g * lower[j];
            double b = 1.0 - g * diag[j];
            double c = -g * upper[j];
            double m = b - a * cp[j - 1];
            cp[j] = c / m;
            dp[j] = (rhs[j] - a * dp[j - 1]) / m;
        }
        x[n - 1] = dp[n - 1];
        for (int j = n - 2; j >= 0; --j) x[j] = dp[j] - cp[j] * x[j + 1];
    }
};

struct Stepper {
    std::vector<double> cp, dp, tmp, tmp2;

    // Crank-Nicolson step of size dt; first_steps use two implicit-Euler
    // half-steps (Rannacher start) to damp projection roughness.
    void step(const Operator1D& op, double* u, double dt, bool rannacher) {
        tmp.resize(op.n);
        tmp2.resize(op.n);
        if (rannacher) {
            op.solve_shifted(0.5 * dt, u, tmp.data(), cp, dp);
            op.solve_shifted(0.5 * dt, tmp.data(), u, cp, dp);
        } else {
            op.apply(u, tmp.data());
            for (int j = 0; j < op.n; ++j) tmp2[j] = u[j] + 0.5 * dt * tmp[j];
            op.solve_shifted(0.5 * dt, tmp2.data(), u, cp, dp);
        }
    }
};

int auto_steps(double t, double dr, int requested) {
    if (requested > 0) return requested;
    long n = static_cast<long>(std::ceil(t / dr));
    return static_cast<int>(std::clamp(n, 64L, 40000L));
}

}  // namespace

// ---------------------------------------------------------------------------
// GridField evaluation
// ---------------------------------------------------------------------------

// Cubic Lagrange interpolation (or its derivative) on 4 consecutive cell
// centers of a uniform grid; clamped stencil extrapolates near the edges.
double GridField::line_interp(const std::vector<double>& coeff, int offset, double x, bool deriv,
                              double lo, double hi, int n) const {
    double dx = (hi - lo) / n;
    int j0 = static_cast<int>(std::floor((x - lo) / dx - 0.5)) - 1;
    j0 = std::clamp(j0, 0, n - 4);
    double xs[4], ys[4];
    for (int k = 0; k < 4; ++k) {
        xs[k] = lo + (j0 + k + 0.5) * dx;
        ys[k] = coeff[static_cast<std::size_t>(offset + j0 + k)];
    }
    double out = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (!deriv) {
            double lk = 1.0;
            for (int m = 0; m < 4; ++m)
                if (m != k) lk *= (x - xs[m]) / (xs[k] - xs[m]);
            out += ys[k] * lk;
        } else {
            double dk = 0.0;
            for (int d = 0; d < 4; ++d) {
                if (d == k) continue;
                double p = 1.0 / (xs[k] - xs[d]);
                for (int m = 0; m < 4; ++m)
                    if (m != k && m != d) p *= (x - xs[m]) / (xs[k] - xs[m]);
                dk += p;
            }
            out += ys[k] * dk;
        }
    }
    return out;
}

double GridField::value(Vec x) const {
    switch (kind_) {
        case Kind::Line:
            return line_interp(v_, 0, x.x, false, lo_, hi_, n_);
        case Kind::Polar: {
            double r = x.norm();
            double th = std::atan2(x.y, x.x);
            double u = line_interp(v_, 0, r, false, lo_, hi_, n_);
            double c1 = std::cos(th), s1 = std::sin(th);
            double cm = 1.0, sm = 0.0;
            for (int m = 1; m <= modes_; ++m) {
                double c = cm * c1 - sm * s1;
                double s = sm * c1 + cm * s1;
                cm = c;
                sm = s;
                u += line_interp(v_, m * n_, r, false, lo_, hi_, n_) * cm +
                     line_interp(v_, (modes_ + m) * n_, r, false, lo_, hi_, n_) * sm;
            }
            return u;
        }
        case Kind::Tensor: {
            double dy = (hi_y_ - lo_y_) / ny_;
            int j0 = static_cast<int>(std::floor((x.y - lo_y_) / dy - 0.5)) - 1;
            j0 = std::clamp(j0, 0, ny_ - 4);
            std::vector<double> col(4);
            double ys[4];
            for (int k = 0; k < 4; ++k) {
                ys[k] = lo_y_ + (j0 + k + 0.5) * dy;
                col[k] = line_interp(v_, (j0 + k) * n_, x.x, false, lo_, hi_, n_);
            }
            double out = 0.0;
            for (int k = 0; k < 4; ++k) {
                double lk = 1.0;
                for (int m = 0; m < 4; ++m)
                    if (m != k) lk *= (x.y - ys[m]) / (ys[k] - ys[m]);
                out += col[k] * lk;
            }
            return out;
        }
    }
    return 0.0;
}

Vec GridField::gradient(Vec x) const {
    switch (kind_) {
        case Kind::Line:
            return {line_interp(v_, 0, x.x, true, lo_, hi_, n_), 0.0};
        case Kind::Polar: {
            double r = x.norm();
            double dr = (hi_ - lo_) / n_;
            if (r < lo_ + dr) {
                // near the polar origin the 1/r theta-term is ill-conditioned:
                // fall back to central differences of the smooth reconstruction
                double h = 0.5 * dr;
                return {(value({x.x + h, x.y}) - value({x.x - h, x.y})) / (2.0 * h),
                        (value({x.x, x.y + h}) - value({x.x, x.y - h})) / (2.0 * h)};
            }
            double th = std::atan2(x.y, x.x);
            double ur = line_interp(v_, 0, r, true, lo_, hi_, n_);
            double ut = 0.0;
            double c1 = std::cos(th), s1 = std::sin(th);
            double cm = 1.0, sm = 0.0;
            for (int m = 1; m <= modes_; ++m) {
                double c = cm * c1 - sm * s1;
                double s = sm * c1 + cm * s1;
                cm = c;
                sm = s;
                double am = line_interp(v_, m * n_, r, false, lo_, hi_, n_);
                double bm = line_interp(v_, (modes_ + m) * n_, r, false, lo_, hi_, n_);
                ur += line_interp(v_, m * n_, r, true, lo_, hi_, n_) * cm +
                      line_interp(v_, (modes_ + m) * n_, r, true, lo_, hi_, n_) * sm;
                ut += static_cast<double>(m) * (-am * sm + bm * cm);
            }
            double er_x = x.x / r, er_y = x.y / r;
            double utr = ut / r;
            return {ur * er_x - utr * er_y, ur * er_y + utr * er_x};
        }
        case Kind::Tensor: {
            double dy = (hi_y_ - lo_y_) / ny_;
            int j0 = std::clamp(static_cast<int>(std::floor((x.y - lo_y_) / dy - 0.5)) - 1, 0,
                                ny_ - 4);
            double ys[4], vx[4], vv[4];
            for (int k = 0; k < 4; ++k) {
                ys[k] = lo_y_ + (j0 + k + 0.5) * dy;
                vx[k] = line_interp(v_, (j0 + k) * n_, x.x, true, lo_, hi_, n_);
                vv[k] = line_interp(v_, (j0 + k) * n_, x.x, false, lo_, hi_, n_);
            }
            double gx = 0.0, gy = 0.0;
            for (int k = 0; k < 4; ++k) {
                double lk = 1.0, dk = 0.0;
                for (int m = 0; m < 4; ++m)
                    if (m != k) lk *= (x.y - ys[m]) / (ys[k] - ys[m]);
                for (int d = 0; d < 4; ++d) {
                    if (d == k) continue;
                    double p = 1.0 / (ys[k] - ys[d]);
                    for (int m = 0; m < 4; ++m)
                        if (m != k && m != d) p *= (x.y - ys[m]) / (ys[k] - ys[m]);
                    dk += p;
                }
                gx += vx[k] * lk;
                gy += vv[k] * dk;
            }
            return {gx, gy};
        }
    }
    return {};
}

// Integral against e^{V - Vmax} dx, gauged by the grid maximum of the drift
// potential V: on a wide truncated half line with outward drift, e^V itself
// overflows. The gauge depends only on the grid, so conservation comparisons
// between snapshots of one solve are unaffected.
double GridField::mass() const {
    double m = 0.0;
    double vmax = 0.0;
    if (drift_a_ > 0.0) {
        double r = std::max(std::fabs(lo_), std::fabs(hi_));
        vmax = 0.5 * drift_a_ * r * r;
        if (kind_ == Kind::Tensor) {
            double ry = std::max(std::fabs(lo_y_), std::fabs(hi_y_));
            vmax += 0.5 * drift_a_ * ry * ry;
        }
    }
    switch (kind_) {
        case Kind::Line: {
            double dx = (hi_ - lo_) / n_;
            for (int j = 0; j < n_; ++j) {
                double xj = lo_ + (j + 0.5) * dx;
                m += v_[static_cast<std::size_t>(j)] * std::exp(0.5 * drift_a_ * xj * xj - vmax) * dx;
            }
            return m;
        }
        case Kind::Polar: {
            double dr = (hi_ - lo_) / n_;
            for (int j = 0; j < n_; ++j) {
                double rj = lo_ + (j + 0.5) * dr;
                m += v_[static_cast<std::size_t>(j)] * rj *
                     std::exp(0.5 * drift_a_ * rj * rj - vmax) * dr;
            }
            return 2.0 * kPi * m;
        }
        case Kind::Tensor: {
            double dx = (hi_ - lo_) / n_, dy = (hi_y_ - lo_y_) / ny_;
            for (int j = 0; j < ny_; ++j) {
                double yj = lo_y_ + (j + 0.5) * dy;
                for (int i = 0; i < n_; ++i) {
                    double xi = lo_ + (i + 0.5) * dx;
                    m += v_[static_cast<std::size_t>(j * n_ + i)] *
                         std::exp(0.5 * drift_a_ * (xi * xi + yj * yj) - vmax) * dx * dy;
                }
            }
            return m;
        }
    }
    return m;
}

namespace {
template <class F>
void polar_sample(int n, int modes, double lo, double hi, const std::vector<double>& v, F&& emit) {
    int ntheta = 4 * std::max(modes, 16);
    double dr = (hi - lo) / n;
    std::vector<double> ct(ntheta), st(ntheta);
    for (int k = 0; k < ntheta; ++k) {
        double th = 2.0 * kPi * k / ntheta;
        ct[k] = std::cos(th);
        st[k] = std::sin(th);
    }
    for (int j = 0; j < n; ++j) {
        double rj = lo + (j + 0.5) * dr;
        for (int k = 0; k < ntheta; ++k) {
            double u = v[static_cast<std::size_t>(j)];
            double cm = 1.0, sm = 0.0;
            for (int m = 1; m <= modes; ++m) {
                double c = cm * ct[k] - sm * st[k];
                double s = sm * ct[k] + cm * st[k];
                cm = c;
                sm = s;
                u += v[static_cast<std::size_t>(m * n + j)] * cm +
                     v[static_cast<std::size_t>((modes + m) * n + j)] * sm;
            }
            emit(rj * ct[k], rj * st[k], u);
        }
    }
}
}  // namespace

double GridField::min_value() const {
    double m = v_[0];
    if (kind_ == Kind::Polar) {
        m = 1e300;
        polar_sample(n_, modes_, lo_, hi_, v_, [&m](double, double, double u) { m = std::min(m, u); });
    } else {
        for (double u : v_) m = std::min(m, u);
    }
    return m;
}

double GridField::max_value() const {
    double m = v_[0];
    if (kind_ == Kind::Polar) {
        m = -1e300;
        polar_sample(n_, modes_, lo_, hi_, v_, [&m](double, double, double u) { m = std::max(m, u); });
    } else {
        for (double u : v_) m = std::max(m, u);
    }
    return m;
}

double GridField::angular_variance() const {
    if (kind_ != Kind::Polar) return 0.0;
    double s = 0.0;
    for (int m = 1; m <= modes_; ++m)
        for (int j = 0; j < n_; ++j) {
            double a = v_[static_cast<std::size_t>(m * n_ + j)];
            double b = v_[static_cast<std::size_t>((modes_ + m) * n_ + j)];
            s = std::max(s, a * a + b * b);
        }
    return s;
}

void GridField::dump_csv(std::ostream& os) const {
    switch (kind_) {
        case Kind::Line: {
            os << "x,u\n";
            double dx = (hi_ - lo_) / n_;
            for (int j = 0; j < n_; ++j)
                os << lo_ + (j + 0.5) * dx << "," << v_[static_cast<std::size_t>(j)] << "\n";
            return;
        }
        case Kind::Polar: {
            os << "x,y,u\n";
            polar_sample(n_, modes_, lo_, hi_, v_,
                         [&os](double x, double y, double u) { os << x << "," << y << "," << u << "\n"; });
            return;
        }
        case Kind::Tensor: {
            os << "x,y,u\n";
            double dx = (hi_ - lo_) / n_, dy = (hi_y_ - lo_y_) / ny_;
            for (int j = 0; j < ny_; ++j)
                for (int i = 0; i < n_; ++i)
                    os << lo_ + (i + 0.5) * dx << "," << lo_y_ + (j + 0.5) * dy << ","
                       << v_[static_cast<std::size_t>(j * n_ + i)] << "\n";
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

class HeatSolver {
  public:
    HeatSolver(const ManifoldModel& model, const ScalarField& f0, const PdeParams& params,
               double t_total)
        : model_(model), params_(params) {
        a_ = linear_drift_coeff(model);
        switch (model.shape.kind) {
            case ShapeKind::HalfLine: {
                double cut = params.half_line_cut;
                if (cut <= 0.0)
                    cut = (std::max(params.x_hint, 1.0) + 10.0 * std::sqrt(2.0 * std::max(t_total, 1e-8))) *
                          std::exp(std::max(a_, 0.0) * t_total);
                init_line(0.0, cut, f0);
                break;
            }
            case ShapeKind::Interval:
                init_line(model.shape.a, model.shape.b, f0);
                break;
            case ShapeKind::Disk:
                init_polar(0.0, model.shape.b, f0);
                break;
            case ShapeKind::Annulus:
                init_polar(model.shape.a, model.shape.b, f0);
                break;
            case ShapeKind::Rectangle:
                init_tensor(model.shape.a, model.shape.b, f0);
                break;
        }
        field_.drift_a_ = a_;
        mass0_ = field_.mass();
        // reference scale for the conservation check: the measure of the
        // domain, so zero-mean initial data does not trip the relative test
        GridField ones = field_;
        std::fill(ones.v_.begin(), ones.v_.end(), 0.0);
        if (ones.kind_ == GridField::Kind::Polar)
            std::fill(ones.v_.begin(), ones.v_.begin() + ones.n_, 1.0);
        else
            std::fill(ones.v_.begin(), ones.v_.end(), 1.0);
        mass_scale_ = std::max(std::fabs(mass0_), ones.mass());
    }

    // advance the current state by dt_total
    void advance(double dt_total) {
        if (dt_total <= 0.0) return;
        double dr = (field_.hi_ - field_.lo_) / field_.n_;
        int steps = auto_steps(dt_total, dr, params_.n_steps);
        double dt = dt_total / steps;
        for (int s = 0; s < steps; ++s) {
            bool rann = fresh_ && s < 2;
            switch (field_.kind_) {
                case GridField::Kind::Line:
                    stepper_.step(ops_[0], field_.v_.data(), dt, rann);
                    break;
                case GridField::Kind::Polar:
                    for (int row = 0; row < 2 * field_.modes_ + 1; ++row) {
                        int m = row <= field_.modes_ ? row : row - field_.modes_;
                        stepper_.step(ops_[static_cast<std::size_t>(m)],
                                      field_.v_.data() + static_cast<std::ptrdiff_t>(row) * field_.n_,
                                      dt, rann);
                    }
                    break;
                case GridField::Kind::Tensor:
                    step_tensor(dt, rann);
                    break;
            }
        }
        fresh_ = false;
        field_.t_ += dt_total;
        check_mass();
    }

    GridField snapshot() const { return field_; }

  private:
    void init_line(double lo, double hi, const ScalarField& f0) {
        int n = std::max(params_.n_cells, 8);
        field_.kind_ = GridField::Kind::Line;
        field_.lo_ = lo;
        field_.hi_ = hi;
        field_.n_ = n;
        field_.v_.resize(static_cast<std::size_t>(n));
        double dx = (hi - lo) / n;
        for (int j = 0; j < n; ++j) field_.v_[static_cast<std::size_t>(j)] = f0({lo + (j + 0.5) * dx});
        std::vector<double> lwface(static_cast<std::size_t>(n) + 1), lwcell(static_cast<std::size_t>(n));
        for (int j = 0; j <= n; ++j) {
            double xf = lo + j * dx;
            lwface[static_cast<std::size_t>(j)] = 0.5 * a_ * xf * xf;
        }
        // Neumann closure
        lwface.front() = lwface.back() = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            double xc = lo + (j + 0.5) * dx;
            lwcell[static_cast<std::size_t>(j)] = 0.5 * a_ * xc * xc;
        }
        ops_.resize(1);
        ops_[0].build(n, dx, lwface, lwcell, {});
    }

    void init_polar(double r_lo, double r_hi, const ScalarField& f0) {
        int n = std::max(params_.n_cells, 8);
        int M = std::max(params_.n_modes, 1);
        int ntheta = std::max(params_.n_theta, 4 * M);
        field_.kind_ = GridField::Kind::Polar;
        field_.lo_ = r_lo;
        field_.hi_ = r_hi;
        field_.n_ = n;
        field_.modes_ = M;
        field_.v_.assign(static_cast<std::size_t>((2 * M + 1)) * n, 0.0);
        double dr = (r_hi - r_lo) / n;
        // project the initial data onto Fourier modes by periodic trapezoid
        std::vector<double> ct(static_cast<std::size_t>(ntheta)), st(static_cast<std::size_t>(ntheta));
        for (int k = 0; k < ntheta; ++k) {
            double th = 2.0 * kPi * k / ntheta;
            ct[static_cast<std::size_t>(k)] = std::cos(th);
            st[static_cast<std::size_t>(k)] = std::sin(th);
        }
        for (int j = 0; j < n; ++j) {
            double rj = r_lo + (j + 0.5) * dr;
            for (int k = 0; k < ntheta; ++k) {
                double fv = f0({rj * ct[static_cast<std::size_t>(k)], rj * st[static_cast<std::size_t>(k)]});
                field_.v_[static_cast<std::size_t>(j)] += fv;
                double cm = 1.0, sm = 0.0;
                for (int m = 1; m <= M; ++m) {
                    double c = cm * ct[static_cast<std::size_t>(k)] - sm * st[static_cast<std::size_t>(k)];
                    double s = sm * ct[static_cast<std::size_t>(k)] + cm * st[static_cast<std::size_t>(k)];
                    cm = c;
                    sm = s;
                    field_.v_[static_cast<std::size_t>(m * n + j)] += fv * cm;
                    field_.v_[static_cast<std::size_t>((M + m) * n + j)] += fv * sm;
                }
            }
        }
        double norm0 = 1.0 / ntheta, norm = 2.0 / ntheta;
        for (int j = 0; j < n; ++j) field_.v_[static_cast<std::size_t>(j)] *= norm0;
        for (int m = 1; m <= M; ++m)
            for (int j = 0; j < n; ++j) {
                field_.v_[static_cast<std::size_t>(m * n + j)] *= norm;
                field_.v_[static_cast<std::size_t>((M + m) * n + j)] *= norm;
            }
        // one radial operator per mode; weight w(r) = r e^{V(r)}
        std::vector<double> lwface(static_cast<std::size_t>(n) + 1), lwcell(static_cast<std::size_t>(n));
        for (int j = 0; j <= n; ++j) {
            double rf = r_lo + j * dr;
            lwface[static_cast<std::size_t>(j)] = std::log(rf) + 0.5 * a_ * rf * rf;
        }
        lwface.front() = lwface.back() = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            double rc = r_lo + (j + 0.5) * dr;
            lwcell[static_cast<std::size_t>(j)] = std::log(rc) + 0.5 * a_ * rc * rc;
        }
        ops_.resize(static_cast<std::size_t>(M) + 1);
        std::vector<double> q(static_cast<std::size_t>(n));
        for (int m = 0; m <= M; ++m) {
            for (int j = 0; j < n; ++j) {
                double rc = r_lo + (j + 0.5) * dr;
                q[static_cast<std::size_t>(j)] = static_cast<double>(m) * m / (rc * rc);
            }
            ops_[static_cast<std::size_t>(m)].build(n, dr, lwface, lwcell, q);
        }
    }

    void init_tensor(double w, double h, const ScalarField& f0) {
        int nx = std::max(params_.n_cells, 8);
        int ny = std::max(static_cast<int>(std::lround(nx * h / w)), 8);
        field_.kind_ = GridField::Kind::Tensor;
        field_.lo_ = 0.0;
        field_.hi_ = w;
        field_.lo_y_ = 0.0;
        field_.hi_y_ = h;
        field_.n_ = nx;
        field_.ny_ = ny;
        field_.v_.resize(static_cast<std::size_t>(nx) * ny);
        double dx = w / nx, dy = h / ny;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                field_.v_[static_cast<std::size_t>(j * nx + i)] =
                    f0({(i + 0.5) * dx, (j + 0.5) * dy});
        ops_.resize(2);
        auto build_dir = [this](int n, double lo, double hi, Operator1D& op) {
            double d = (hi - lo) / n;
            std::vector<double> lwface(static_cast<std::size_t>(n) + 1), lwcell(static_cast<std::size_t>(n));
            for (int j = 0; j <= n; ++j) {
                double xf = lo + j * d;
                lwface[static_cast<std::size_t>(j)] = 0.5 * a_ * xf * xf;
            }
            lwface.front() = lwface.back() = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                double xc = lo + (j + 0.5) * d;
                lwcell[static_cast<std::size_t>(j)] = 0.5 * a_ * xc * xc;
            }
            op.build(n, d, lwface, lwcell, {});
        };
        build_dir(nx, 0.0, w, ops_[0]);
        build_dir(ny, 0.0, h, ops_[1]);
    }

    void step_tensor(double dt, bool rann) {
        int nx = field_.n_, ny = field_.ny_;
        // x sweep row by row, then y sweep column by column; the split is
        // exact because the two 1D operators commute (separable potential)
        for (int j = 0; j < ny; ++j)
            stepper_.step(ops_[0], field_.v_.data() + static_cast<std::ptrdiff_t>(j) * nx, dt, rann);
        col_.resize(static_cast<std::size_t>(ny));
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) col_[static_cast<std::size_t>(j)] = field_.v_[static_cast<std::size_t>(j * nx + i)];
            stepper_.step(ops_[1], col_.data(), dt, rann);
            for (int j = 0; j < ny; ++j) field_.v_[static_cast<std::size_t>(j * nx + i)] = col_[static_cast<std::size_t>(j)];
        }
    }

    void check_mass() const {
        double m = field_.mass();
        double per_unit = std::fabs(m - mass0_) / mass_scale_ / std::max(field_.t_, 1.0);
        if (per_unit > 1e-6)
            throw ResolutionTooCoarse("discrete mass drift " + std::to_string(per_unit) +
                                      " per unit time exceeds 1e-6");
    }

    ManifoldModel model_;
    PdeParams params_;
    double a_ = 0.0;
    double mass0_ = 0.0;
    double mass_scale_ = 1.0;
    bool fresh_ = true;
    GridField field_;
    std::vector<Operator1D> ops_;
    Stepper stepper_;
    std::vector<double> col_;
};

GridField solve_neumann_heat(const ManifoldModel& model, const ScalarField& f0, double t,
                             const PdeParams& params) {
    HeatSolver solver(model, f0, params, t);
    solver.advance(t);
    return solver.snapshot();
}

GridField solve_neumann_heat(const ManifoldModel& model, const TestFunction& f, double t,
                             const PdeParams& params) {
    return solve_neumann_heat(model, [&f](Vec x) { return f.value(x); }, t, params);
}

std::vector<GridField> solve_neumann_heat_snapshots(const ManifoldModel& model,
                                                    const ScalarField& f0,
                                                    const std::vector<double>& times,
                                                    const PdeParams& params) {
    double t_total = times.empty() ? 0.0 : times.back();
    HeatSolver solver(model, f0, params, t_total);
    std::vector<GridField> out;
    double cur = 0.0;
    for (double t : times) {
        if (t < cur) throw ConfigError("snapshot times must be ascending");
        solver.advance(t - cur);
        cur = t;
        out.push_back(solver.snapshot());
    }
    return out;
}

double functional_on_grid(const std::vector<const GridField*>& fields, Vec x,
                          const std::function<double(const std::vector<double>&)>& combine) {
    std::vector<double> vals;
    vals.reserve(fields.size());
    for (const GridField* f : fields) vals.push_back(f->value(x));
    return combine(vals);
}

}  // namespace neumann
