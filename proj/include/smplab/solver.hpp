#ifndef SMPLAB_SOLVER_HPP
#define SMPLAB_SOLVER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "smplab/geometry.hpp"
#include "smplab/operators.hpp"
#include "smplab/vec.hpp"

namespace smplab {

enum class NodeKind : unsigned char { outside, boundary, interior };

/// Uniform masked grid on an axis-aligned box, n in {1, 2}. The mask realizes
/// either the full box (edge nodes are boundary) or a ball section.
struct Grid {
    int n = 1;
    Box box;
    int nx = 2; // nodes per axis
    double h = 1.0;
    double dt = 0.0;
    double cfl_safety = 0.9;
    std::vector<NodeKind> mask;

    static Grid box_grid(const Box& box, int nx);
    static Grid ball_grid(const Box& box, int nx, const Vec& center,
                          double radius);

    long node_count() const;
    Vec coord(long idx) const;
    long index(int i, int j = 0) const;
    bool inside(long idx) const { return mask[idx] != NodeKind::outside; }
};

/// Monotone-regime time step bound:
/// cfl_safety / (2 n Lambda / h^2 + (b_sup + |advect|) / h).
double max_stable_dt(const OperatorSpec& spec, const Grid& grid);

struct GridFunction {
    std::vector<double> values;
};

GridFunction sample(const Grid& grid,
                    const std::function<double(const Vec&)>& fn);

using SpaceTimeFn = std::function<double(const Vec&, double)>;

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<GridFunction> levels;
    std::vector<std::pair<double, long>> max_track; // per-level (max, argmax)
    double dt = 0.0;
};

/// One explicit Euler update at time t over interior nodes; boundary and
/// outside values are copied through. First-order terms are upwinded, the
/// |Du| coefficient uses a Godunov gradient so the update is monotone under
/// the CFL bound.
GridFunction scheme_step(const OperatorSpec& spec, const Grid& grid,
                         const GridFunction& u, double t, double dt);

/// Explicit forward evolution of u_t = F(x,t,u,Du,D^2u) from t = 0 to t_end.
/// The step is fitted so t_end is an exact multiple; boundary nodes follow
/// lateral data. Throws on CFL violation (unless overridden) and on
/// NaN/overflow with the offending step index.
EvolutionTrace evolve(const OperatorSpec& spec, const Grid& grid,
                      const GridFunction& initial, const SpaceTimeFn& lateral,
                      double t_end, bool allow_cfl_violation = false);

enum class ResidualMode { sub, super };

struct ResidualReport {
    double worst = 0.0;
    long node = -1;
    double time = 0.0;
};

/// Pointwise residual F - du/dt (forward time difference, F taken at the
/// departing level) over interior
/// space-time nodes: sub mode returns the minimum, super mode the maximum.
ResidualReport residual(const OperatorSpec& spec, const Grid& grid,
                        const EvolutionTrace& trace, ResidualMode mode);

/// Two-level trace holding a stationary witness, for residual checks.
EvolutionTrace static_trace(const Grid& grid,
                            const std::function<double(const Vec&)>& fn,
                            double dt = 1e-2);

struct ComparisonReport {
    bool ordered = true;
    bool cfl_ok = true;
    double max_violation = 0.0;
    long step = -1;
    long node = -1;
    long steps_run = 0;
};

/// Evolves both functions under the same spec and asserts u <= v + 1e-12
/// nodewise at every step. A CFL-violating dt is flagged and the run still
/// executed (guarded against overflow) so the loss of monotonicity is
/// observable.
ComparisonReport discrete_comparison(const OperatorSpec& spec, const Grid& grid,
                                     const GridFunction& u0,
                                     const GridFunction& v0,
                                     const SpaceTimeFn& lateral_u,
                                     const SpaceTimeFn& lateral_v, double t_end,
                                     double dt_override = 0.0);

} // namespace smplab

#endif
