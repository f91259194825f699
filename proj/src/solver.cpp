#include "smplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace smplab {

namespace {

Grid make_grid(const Box& box, int nx) {
    Grid g;
    g.n = static_cast<int>(box.lo.size());
    if (g.n < 1 || g.n > 2)
        throw std::invalid_argument("Grid: spatial dimension must be 1 or 2");
    if (nx < 3)
        throw std::invalid_argument("Grid: need at least 3 nodes per axis");
    g.box = box;
    g.nx = nx;
    g.h = (box.hi[0] - box.lo[0]) / (nx - 1);
    for (int i = 0; i < g.n; ++i) {
        const double hi = (box.hi[i] - box.lo[i]) / (nx - 1);
        if (!(hi > 0.0) || std::abs(hi - g.h) > 1e-12 * g.h)
            throw std::invalid_argument("Grid: box must be uniform per axis");
    }
    g.mask.assign(g.node_count(), NodeKind::outside);
    return g;
}

} // namespace

long Grid::node_count() const {
    long c = nx;
    if (n == 2)
        c *= nx;
    return c;
}

long Grid::index(int i, int j) const {
    return n == 1 ? i : static_cast<long>(j) * nx + i;
}

Vec Grid::coord(long idx) const {
    Vec x(n);
    if (n == 1) {
        x[0] = box.lo[0] + h * idx;
    } else {
        x[0] = box.lo[0] + h * (idx % nx);
        x[1] = box.lo[1] + h * (idx / nx);
    }
    return x;
}

Grid Grid::box_grid(const Box& box, int nx) {
    Grid g = make_grid(box, nx);
    if (g.n == 1) {
        for (int i = 0; i < nx; ++i)
            g.mask[i] = (i == 0 || i == nx - 1) ? NodeKind::boundary
                                                : NodeKind::interior;
    } else {
        for (int j = 0; j < nx; ++j)
            for (int i = 0; i < nx; ++i)
                g.mask[g.index(i, j)] =
                    (i == 0 || i == nx - 1 || j == 0 || j == nx - 1)
                        ? NodeKind::boundary
                        : NodeKind::interior;
    }
    return g;
}

Grid Grid::ball_grid(const Box& box, int nx, const Vec& center, double radius) {
    Grid g = make_grid(box, nx);
    auto in_ball = [&](int i, int j) {
        if (i < 0 || i >= nx || j < 0 || (g.n == 2 && j >= nx))
            return false;
        const Vec x = g.coord(g.index(i, j));
        return norm(sub(x, center)) < radius;
    };
    const int jmax = g.n == 2 ? nx : 1;
    for (int j = 0; j < jmax; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (!in_ball(i, j))
                continue;
            bool all_neighbors = true;
            for (int dj = -(g.n - 1); dj <= g.n - 1 && all_neighbors; ++dj)
                for (int di = -1; di <= 1 && all_neighbors; ++di)
                    if (!in_ball(i + di, j + dj))
                        all_neighbors = false;
            g.mask[g.index(i, j)] =
                all_neighbors ? NodeKind::interior : NodeKind::boundary;
        }
    }
    return g;
}

double max_stable_dt(const OperatorSpec& spec, const Grid& grid) {
    const double diffusive = 2.0 * grid.n * spec.Lambda / (grid.h * grid.h);
    const double advective = spec.first_order_bound() / grid.h;
    return grid.cfl_safety / (diffusive + advective);
}

GridFunction sample(const Grid& grid,
                    const std::function<double(const Vec&)>& fn) {
    GridFunction u;
    u.values.assign(grid.node_count(), 0.0);
    for (long idx = 0; idx < grid.node_count(); ++idx)
        if (grid.inside(idx))
            u.values[idx] = fn(grid.coord(idx));
    return u;
}

namespace {

struct Stencil {
    // values[axis][0] = backward neighbor, [1] = center, [2] = forward
    double v[2][3];
    double diag_pp = 0.0, diag_mm = 0.0, diag_pm = 0.0, diag_mp = 0.0;
};

Stencil gather(const Grid& grid, const std::vector<double>& u, long idx) {
    Stencil st{};
    if (grid.n == 1) {
        st.v[0][0] = u[idx - 1];
        st.v[0][1] = u[idx];
        st.v[0][2] = u[idx + 1];
    } else {
        const int nx = grid.nx;
        st.v[0][0] = u[idx - 1];
        st.v[0][1] = u[idx];
        st.v[0][2] = u[idx + 1];
        st.v[1][0] = u[idx - nx];
        st.v[1][1] = u[idx];
        st.v[1][2] = u[idx + nx];
        st.diag_pp = u[idx + nx + 1];
        st.diag_mm = u[idx - nx - 1];
        st.diag_pm = u[idx - nx + 1]; // +x, -y
        st.diag_mp = u[idx + nx - 1]; // -x, +y
    }
    return st;
}

SymMat hessian_of(const Stencil& st, const Grid& grid) {
    const double h2 = grid.h * grid.h;
    SymMat m(grid.n);
    for (int a = 0; a < grid.n; ++a)
        m.at(a, a) = (st.v[a][2] - 2.0 * st.v[a][1] + st.v[a][0]) / h2;
    if (grid.n == 2)
        m.at(0, 1) =
            (st.diag_pp + st.diag_mm - st.diag_pm - st.diag_mp) / (4.0 * h2);
    return m;
}

Vec centered_grad(const Stencil& st, const Grid& grid) {
    Vec p(grid.n);
    for (int a = 0; a < grid.n; ++a)
        p[a] = (st.v[a][2] - st.v[a][0]) / (2.0 * grid.h);
    return p;
}

// Godunov gradient magnitude for the +b|Du| term (nondecreasing in each
// neighbor value); sign = -1 gives the mirrored version for -b|Du|.
double godunov_grad_norm(const Stencil& st, const Grid& grid, int sign) {
    double s = 0.0;
    for (int a = 0; a < grid.n; ++a) {
        const double fwd = sign * (st.v[a][2] - st.v[a][1]) / grid.h;
        const double bwd = sign * (st.v[a][0] - st.v[a][1]) / grid.h;
        const double g = std::max({fwd, bwd, 0.0});
        s += g * g;
    }
    return std::sqrt(s);
}

double upwind_advect(const Stencil& st, const Grid& grid, const Vec& a) {
    double s = 0.0;
    for (int ax = 0; ax < grid.n; ++ax) {
        if (a[ax] > 0.0)
            s += a[ax] * (st.v[ax][2] - st.v[ax][1]) / grid.h;
        else
            s += a[ax] * (st.v[ax][1] - st.v[ax][0]) / grid.h;
    }
    return s;
}

// Monotone right-hand side used by the explicit step.
double scheme_rhs(const OperatorSpec& spec, const Grid& grid, const Stencil& st,
                  const Vec& x, double t) {
    const SymMat m = hessian_of(st, grid);
    const Vec p = centered_grad(st, grid);
    double v = principal_value(spec, p, m);
    if (spec.kind == OperatorKind::pucci_plus)
        v += spec.coeffs.b_at(x, t) * godunov_grad_norm(st, grid, +1);
    else if (spec.kind == OperatorKind::pucci_minus)
        v -= spec.coeffs.b_at(x, t) * godunov_grad_norm(st, grid, -1);
    if (!spec.advect.empty())
        v += upwind_advect(st, grid, spec.advect);
    v += spec.coeffs.c_at(x, t) * st.v[0][1] + spec.coeffs.f_at(x, t);
    return v;
}

} // namespace

GridFunction scheme_step(const OperatorSpec& spec, const Grid& grid,
                         const GridFunction& u, double t, double dt) {
    GridFunction next = u;
    for (long idx = 0; idx < grid.node_count(); ++idx) {
        if (grid.mask[idx] != NodeKind::interior)
            continue;
        const Stencil st = gather(grid, u.values, idx);
        next.values[idx] =
            u.values[idx] + dt * scheme_rhs(spec, grid, st, grid.coord(idx), t);
    }
    return next;
}

namespace {

std::pair<double, long> track_max(const Grid& grid, const GridFunction& u) {
    double best = -std::numeric_limits<double>::infinity();
    long arg = -1;
    for (long idx = 0; idx < grid.node_count(); ++idx)
        if (grid.inside(idx) && u.values[idx] > best) {
            best = u.values[idx];
            arg = idx;
        }
    return {best, arg};
}

} // namespace

EvolutionTrace evolve(const OperatorSpec& spec, const Grid& grid,
                      const GridFunction& initial, const SpaceTimeFn& lateral,
                      double t_end, bool allow_cfl_violation) {
    if (!(t_end > 0.0))
        throw std::invalid_argument("evolve: t_end must be positive");
    if (grid.dt <= 0.0)
        throw std::invalid_argument("evolve: grid.dt not set");
    if (spec.dim != grid.n)
        throw std::invalid_argument("evolve: spec/grid dimension mismatch");
    const double dt_max = max_stable_dt(spec, grid);
    if (grid.dt > dt_max * (1.0 + 1e-12) && !allow_cfl_violation)
        throw std::invalid_argument("evolve: CFL violation, dt " +
                                    std::to_string(grid.dt) + " > " +
                                    std::to_string(dt_max));

    const long steps =
        static_cast<long>(std::ceil(t_end / grid.dt - 1e-9));
    const double dt = t_end / static_cast<double>(steps); // exact landing

    EvolutionTrace trace;
    trace.dt = dt;
    trace.times.reserve(steps + 1);
    trace.levels.reserve(steps + 1);
    trace.times.push_back(0.0);
    trace.levels.push_back(initial);
    trace.max_track.push_back(track_max(grid, initial));

    for (long m = 1; m <= steps; ++m) {
        const double t_prev = (m - 1) * dt;
        const double t_now = m * dt;
        GridFunction next =
            scheme_step(spec, grid, trace.levels.back(), t_prev, dt);
        for (long idx = 0; idx < grid.node_count(); ++idx) {
            if (grid.mask[idx] == NodeKind::boundary)
                next.values[idx] = lateral(grid.coord(idx), t_now);
            if (grid.inside(idx) && !std::isfinite(next.values[idx]))
                throw std::runtime_error("evolve: non-finite value at step " +
                                         std::to_string(m));
        }
        trace.times.push_back(t_now);
        trace.max_track.push_back(track_max(grid, next));
        trace.levels.push_back(std::move(next));
    }
    return trace;
}

ResidualReport residual(const OperatorSpec& spec, const Grid& grid,
                        const EvolutionTrace& trace, ResidualMode mode) {
    if (trace.levels.size() < 2)
        throw std::invalid_argument("residual: need at least two time levels");
    ResidualReport rep;
    rep.worst = mode == ResidualMode::sub
                    ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
    for (size_t m = 1; m < trace.levels.size(); ++m) {
        const double dt = trace.times[m] - trace.times[m - 1];
        const auto& u = trace.levels[m].values;
        const auto& prev = trace.levels[m - 1].values;
        for (long idx = 0; idx < grid.node_count(); ++idx) {
            if (grid.mask[idx] != NodeKind::interior)
                continue;
            // F is taken at the level the step departs from, so an exact
            // forward-Euler trajectory has zero residual.
            const Stencil st = gather(grid, prev, idx);
            const Vec x = grid.coord(idx);
            const double f =
                eval_operator(spec, x, trace.times[m - 1], prev[idx],
                              centered_grad(st, grid), hessian_of(st, grid));
            const double r = f - (u[idx] - prev[idx]) / dt;
            const bool worse = mode == ResidualMode::sub ? r < rep.worst
                                                         : r > rep.worst;
            if (worse) {
                rep.worst = r;
                rep.node = idx;
                rep.time = trace.times[m];
            }
        }
    }
    return rep;
}

EvolutionTrace static_trace(const Grid& grid,
                            const std::function<double(const Vec&)>& fn,
                            double dt) {
    EvolutionTrace trace;
    trace.dt = dt;
    const GridFunction u = sample(grid, fn);
    trace.times = {0.0, dt};
    trace.levels = {u, u};
    trace.max_track = {track_max(grid, u), track_max(grid, u)};
    return trace;
}

ComparisonReport discrete_comparison(const OperatorSpec& spec, const Grid& grid,
                                     const GridFunction& u0,
                                     const GridFunction& v0,
                                     const SpaceTimeFn& lateral_u,
                                     const SpaceTimeFn& lateral_v, double t_end,
                                     double dt_override) {
    Grid g = grid;
    if (dt_override > 0.0)
        g.dt = dt_override;
    ComparisonReport rep;
    rep.cfl_ok = g.dt <= max_stable_dt(spec, g) * (1.0 + 1e-12);

    const long steps = static_cast<long>(std::ceil(t_end / g.dt - 1e-9));
    const double dt = t_end / static_cast<double>(steps);

    auto check = [&](const GridFunction& u, const GridFunction& v, long step) {
        for (long idx = 0; idx < g.node_count(); ++idx) {
            if (!g.inside(idx))
                continue;
            const double gap = u.values[idx] - v.values[idx];
            if (!std::isfinite(gap) || gap > 1e-12) {
                rep.ordered = false;
                const double viol = std::isfinite(gap)
                                        ? gap
                                        : std::numeric_limits<double>::infinity();
                if (viol > rep.max_violation) {
                    rep.max_violation = viol;
                    rep.step = step;
                    rep.node = idx;
                }
            }
        }
    };

    GridFunction u = u0, v = v0;
    check(u, v, 0);
    for (long m = 1; m <= steps && rep.ordered; ++m) {
        const double t_prev = (m - 1) * dt;
        const double t_now = m * dt;
        u = scheme_step(spec, g, u, t_prev, dt);
        v = scheme_step(spec, g, v, t_prev, dt);
        for (long idx = 0; idx < g.node_count(); ++idx)
            if (g.mask[idx] == NodeKind::boundary) {
                u.values[idx] = lateral_u(g.coord(idx), t_now);
                v.values[idx] = lateral_v(g.coord(idx), t_now);
            }
        check(u, v, m);
        rep.steps_run = m;
    }
    return rep;
}

} // namespace smplab
