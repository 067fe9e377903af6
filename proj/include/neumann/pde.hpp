#pragma once

#include <functional>
#include <vector>

#include "neumann/common.hpp"
#include "neumann/geometry.hpp"
#include "neumann/test_functions.hpp"

namespace neumann {

using ScalarField = std::function<double(Vec)>;

struct PdeParams {
    int n_cells = 512;   // cells per dimension (radial cells for polar grids)
    int n_modes = 48;    // angular Fourier modes kept on Disk/Annulus
    int n_theta = 512;   // angular quadrature points for the initial projection
    int n_steps = 0;     // 0 = choose so that temporal error < spatial error
    double half_line_cut = 0.0;  // 0 = auto: (max(x_hint,1) + 10*sqrt(2t)) * e^{max(a,0)t}
    double x_hint = 1.0;         // largest evaluation coordinate (half-line truncation)
};

// Solution of the Neumann heat equation on a structured grid:
//  - 1D shapes: uniform cell-centered grid, conservative fluxes with weight e^V
//  - Disk/Annulus: Fourier decomposition in theta, per-mode radial solves with
//    weight r e^V; the curved boundary is a grid face, so Neumann is exact
//  - Rectangle: tensor grid, exact dimension splitting (the 1D operators
//    commute for the separable quadratic potential)
class GridField {
  public:
    enum class Kind { Line, Polar, Tensor };

    double value(Vec x) const;
    Vec gradient(Vec x) const;
    double mass() const;       // integral against the invariant measure e^V dx
    double min_value() const;  // sampled nodal extremes
    double max_value() const;
    double time() const { return t_; }

    // Polar only: max over radius of |b_1|+... angular content, used by the
    // radial-symmetry invariant tests.
    double angular_variance() const;

    // Grid dump (r/theta or x/y nodes + values), one row per node.
    void dump_csv(std::ostream& os) const;

  private:
    friend class HeatSolver;
    Kind kind_ = Kind::Line;
    double t_ = 0.0;
    double drift_a_ = 0.0;
    // Line: [lo_, hi_] with n_ cells; Polar: radial [lo_, hi_], n_ cells,
    // modes_ + 1 coefficient rows (a_0..a_M then b_1..b_M); Tensor: nx_ x ny_.
    double lo_ = 0.0, hi_ = 1.0, lo_y_ = 0.0, hi_y_ = 1.0;
    int n_ = 0, ny_ = 0, modes_ = 0;
    std::vector<double> v_;  // Line: n; Polar: (2*modes_+1)*n; Tensor: nx*ny

    double line_interp(const std::vector<double>& coeff, int offset, double x, bool deriv,
                       double lo, double hi, int n) const;
};

// Solve du/dt = (Delta + Z.grad) u, Nu = 0 on the boundary, u(0) = f0, up to
// time t. Drift must be Zero or Linear-equivalent. Throws ResolutionTooCoarse
// if the discrete mass drifts by more than 1e-6 relative per unit time.
GridField solve_neumann_heat(const ManifoldModel& model, const ScalarField& f0, double t,
                             const PdeParams& params = {});
GridField solve_neumann_heat(const ManifoldModel& model, const TestFunction& f, double t,
                             const PdeParams& params = {});

// Fields at each requested time (ascending, >= 0), one continued integration.
std::vector<GridField> solve_neumann_heat_snapshots(const ManifoldModel& model,
                                                    const ScalarField& f0,
                                                    const std::vector<double>& times,
                                                    const PdeParams& params = {});

// Pointwise combination of solved fields at a point, e.g. entropy
// P_t(g) - (P_t f) log P_t f from the fields for g = f log f and f.
double functional_on_grid(const std::vector<const GridField*>& fields, Vec x,
                          const std::function<double(const std::vector<double>&)>& combine);

}  // namespace neumann
