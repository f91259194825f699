#include "smplab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "smplab/barrier.hpp"
#include "smplab/geometry.hpp"
#include "smplab/operators.hpp"
#include "smplab/rng.hpp"
#include "smplab/solver.hpp"

namespace smplab::lab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------- shapes

std::function<double(const Vec&)> make_shape(const json& d) {
    const std::string shape = d.at("shape").get<std::string>();
    const double offset = d.value("offset", 0.0);
    if (shape == "constant") {
        const double v = d.at("value").get<double>() + offset;
        return [v](const Vec&) { return v; };
    }
    if (shape == "bump" || shape == "cosine_bump" ||
        shape == "smoothed_indicator") {
        const double amp = d.at("amplitude").get<double>();
        const Vec center = d.at("center").get<Vec>();
        const double width = d.at("width").get<double>();
        if (!(width > 0.0))
            throw std::invalid_argument("shape: width must be positive");
        if (shape == "bump")
            return [=](const Vec& x) {
                const double r = norm(sub(x, center)) / width;
                if (r >= 1.0)
                    return offset;
                return offset + amp * std::exp(1.0 - 1.0 / (1.0 - r * r));
            };
        if (shape == "cosine_bump")
            return [=](const Vec& x) {
                const double r = norm(sub(x, center)) / width;
                if (r >= 1.0)
                    return offset;
                const double c = std::cos(0.5 * std::numbers::pi * r);
                return offset + amp * c * c;
            };
        const double smoothing = d.value("smoothing", 0.25 * width);
        return [=](const Vec& x) {
            const double t = (width - norm(sub(x, center))) / smoothing;
            if (t <= 0.0)
                return offset;
            if (t >= 1.0)
                return offset + amp;
            return offset + amp * t * t * (3.0 - 2.0 * t);
        };
    }
    if (shape == "quadratic") {
        SymMat a = SymMat(1);
        bool has_a = d.contains("matrix");
        if (has_a) {
            std::vector<std::vector<double>> rows;
            for (const auto& row : d.at("matrix"))
                rows.push_back(row.get<std::vector<double>>());
            a = SymMat::from_dense(rows);
        }
        const Vec lin = d.value("linear", Vec{});
        const double c0 = d.value("constant", 0.0) + offset;
        return [=](const Vec& x) {
            double v = c0;
            if (has_a)
                v += a.quad(x);
            if (!lin.empty())
                v += dot(lin, x);
            return v;
        };
    }
    throw std::invalid_argument("unknown shape: " + shape);
}

SpaceTimeFn make_boundary(const json& d) {
    auto fn = make_shape(d);
    return [fn](const Vec& x, double) { return fn(x); };
}

// ---------------------------------------------------------------- config

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "axis_strictness",    "inclined",
        "broken_line",        "strong_comparison",
        "positivity",         "truncated_counterexample",
        "elliptic_reduction",
    };
    return names;
}

json scenario_defaults(const std::string& name) {
    if (name == "axis_strictness")
        return json::parse(R"({
          "operator": {"kind":"pucci_plus","lambda":1.0,"Lambda":2.0,"dim":2},
          "geometry": {"cylinder":{"x0":[0.0,0.0],"R":1.0,"t1":0.0,"t2":0.2},
                       "r0":0.4,"cert_grid":32},
          "grid": {"nx":41,"cfl_safety":0.9},
          "initial": {"shape":"bump","amplitude":1.0,"center":[0.0,0.0],"width":0.6},
          "boundary": {"shape":"constant","value":0.0},
          "tolerances": {"gap_start":0.01,"gap_min":1e-12}
        })");
    if (name == "inclined")
        return json::parse(R"({
          "operator": {"kind":"pucci_plus","lambda":1.0,"Lambda":2.0,"dim":2},
          "geometry": {"eta":[1.5,0.0],"t1":0.0,"t_end":0.05,"half_width":3.0},
          "grid": {"nx":81,"cfl_safety":0.9},
          "initial": {"shape":"bump","amplitude":1.0,"center":[0.0,0.0],"width":0.3},
          "boundary": {"shape":"constant","value":0.0},
          "tolerances": {"covariance_tol":1e-10,"self_error_factor":2.0}
        })");
    if (name == "broken_line")
        return json::parse(R"({
          "operator": {"kind":"bellman","lambda":1.0,"Lambda":2.0,
                       "matrices":[[[1.0,0.0],[0.0,2.0]],[[2.0,0.0],[0.0,1.0]]]},
          "geometry": {"vertices":[{"x":[0.0,0.0],"t":0.0},
                                   {"x":[0.4,0.0],"t":0.5},
                                   {"x":[0.4,0.0],"t":1.0}],
                       "radius":0.25,"half_width":1.0},
          "grid": {"nx":33,"cfl_safety":0.9},
          "initial": {"shape":"bump","amplitude":-0.5,"center":[0.0,0.0],
                      "width":0.5,"offset":1.0},
          "boundary": {"shape":"constant","value":1.0},
          "tolerances": {"level":1.0,"t_prop":0.05,"gap_min":1e-12,
                         "constant_dev":1e-12}
        })");
    if (name == "strong_comparison")
        return json::parse(R"({
          "operator": {"kind":"pucci_plus","lambda":1.0,"Lambda":2.0,"dim":2},
          "geometry": {"half_width":1.0,"t_end":0.05,"gap":0.3},
          "grid": {"nx":33,"cfl_safety":0.9},
          "initial": {"shape":"bump","amplitude":0.5,"center":[0.0,0.0],"width":0.7},
          "boundary": {"shape":"constant","value":0.0},
          "tolerances": {"order_tol":1e-12,"sub_residual_tol":1e-2,
                         "identical_tol":1e-12}
        })");
    if (name == "positivity")
        return json::parse(R"({
          "operator": {"kind":"bellman","lambda":1.0,"Lambda":2.0,"c":-0.5,
                       "matrices":[[[1.0,0.0],[0.0,2.0]],[[2.0,0.0],[0.0,1.0]]]},
          "geometry": {"half_width":1.0,"t_end":0.1},
          "grid": {"nx":33,"cfl_safety":0.9},
          "initial": {"shape":"bump","amplitude":1.0,"center":[0.0,0.0],"width":0.4},
          "boundary": {"shape":"constant","value":0.0},
          "tolerances": {"t_pos":0.05,"positivity_min":1e-12}
        })");
    if (name == "truncated_counterexample")
        return json::parse(R"({
          "operator": {"kind":"truncated_pucci","lambda":1.0,"Lambda":1.0,
                       "dim":2,"k":1,"sign":"minus"},
          "geometry": {"half_width":1.0},
          "grid": {"nx":33,"cfl_safety":0.9},
          "initial": {"shape":"quadratic","matrix":[[0.0,0.0],[0.0,1.0]]},
          "boundary": {"shape":"constant","value":0.0},
          "tolerances": {"residual_tol":1e-12}
        })");
    if (name == "elliptic_reduction")
        return json::parse(R"({
          "operator": {"kind":"linear","lambda":1.0,"Lambda":1.0,
                       "matrices":[[[1.0,0.0],[0.0,1.0]]]},
          "geometry": {"half_width":1.0,"t_end":0.05},
          "grid": {"nx":33,"cfl_safety":0.9},
          "initial": {"shape":"quadratic","matrix":[[1.0,0.0],[0.0,-1.0]]},
          "boundary": {"shape":"quadratic","matrix":[[1.0,0.0],[0.0,-1.0]]},
          "tolerances": {"drift_tol":1e-12}
        })");
    throw std::invalid_argument("unknown experiment: " + name);
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    static const std::vector<std::string> allowed = {
        "experiment", "operator",   "geometry", "grid", "initial",
        "boundary",   "tolerances", "seed",     "output"};
    if (!j.is_object())
        throw std::invalid_argument("config: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    if (!j.contains("experiment"))
        throw std::invalid_argument("config: missing 'experiment'");

    ExperimentConfig cfg;
    cfg.experiment = j.at("experiment").get<std::string>();
    json merged = scenario_defaults(cfg.experiment); // validates the name
    json overrides = j;
    overrides.erase("experiment");
    if (overrides.contains("seed")) {
        cfg.seed = overrides.at("seed").get<std::uint64_t>();
        overrides.erase("seed");
    }
    if (overrides.contains("output")) {
        cfg.output = overrides.at("output").get<std::string>();
        overrides.erase("output");
    }
    merged.merge_patch(overrides);

    cfg.operator_desc = merged.at("operator");
    cfg.geometry = merged.at("geometry");
    cfg.grid = merged.at("grid");
    cfg.initial = merged.at("initial");
    cfg.boundary = merged.at("boundary");
    cfg.tolerances = merged.at("tolerances");
    for (auto it = cfg.tolerances.begin(); it != cfg.tolerances.end(); ++it)
        if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
            throw std::invalid_argument("config: tolerance '" + it.key() +
                                        "' must be a positive number");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path);
    json j;
    in >> j;
    return from_json(j);
}

std::vector<std::string> list_experiments() { return scenario_names(); }

namespace {

struct Run {
    const ExperimentConfig& cfg;
    ExperimentReport& rep;

    double tol(const std::string& key) const {
        return cfg.tolerances.at(key).get<double>();
    }
    void check(bool ok, const std::string& what) const {
        if (!ok) {
            rep.pass = false;
            rep.failures.push_back(what);
        }
    }
};

Grid build_box_grid(const ExperimentConfig& cfg, int dim) {
    const double hw = cfg.geometry.value("half_width", 1.0);
    Box box{Vec(dim, -hw), Vec(dim, hw)};
    Grid g = Grid::box_grid(box, cfg.grid.at("nx").get<int>());
    g.cfl_safety = cfg.grid.value("cfl_safety", 0.9);
    return g;
}

void set_dt(Grid& g, const OperatorSpec& spec, const ExperimentConfig& cfg) {
    g.dt = cfg.grid.contains("dt") ? cfg.grid.at("dt").get<double>()
                                   : max_stable_dt(spec, g);
}

double interior_max(const Grid& g, const GridFunction& u) {
    double m = -std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < g.node_count(); ++idx)
        if (g.mask[idx] == NodeKind::interior)
            m = std::max(m, u.values[idx]);
    return m;
}

double interior_min(const Grid& g, const GridFunction& u) {
    double m = std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < g.node_count(); ++idx)
        if (g.mask[idx] == NodeKind::interior)
            m = std::min(m, u.values[idx]);
    return m;
}

long nearest_level(const EvolutionTrace& trace, double t) {
    long best = 0;
    for (size_t m = 1; m < trace.times.size(); ++m)
        if (std::abs(trace.times[m] - t) <
            std::abs(trace.times[best] - t))
            best = static_cast<long>(m);
    return best;
}

long nearest_node(const Grid& g, const Vec& x) {
    int i = static_cast<int>(std::lround((x[0] - g.box.lo[0]) / g.h));
    i = std::clamp(i, 0, g.nx - 1);
    int j = 0;
    if (g.n == 2) {
        j = static_cast<int>(std::lround((x[1] - g.box.lo[1]) / g.h));
        j = std::clamp(j, 0, g.nx - 1);
    }
    return g.index(i, j);
}

// ------------------------------------------------------------- scenarios

void run_axis_strictness(Run& run) {
    const auto& cfg = run.cfg;
    const auto& cyl_j = cfg.geometry.at("cylinder");
    const Vec x0 = cyl_j.at("x0").get<Vec>();
    const double R = cyl_j.at("R").get<double>();
    const double t2 = cyl_j.at("t2").get<double>();
    const double r0 = cfg.geometry.at("r0").get<double>();

    OperatorSpec spec = make_operator(cfg.operator_desc);
    Box box{axpy(-R, Vec(spec.dim, 1.0), x0), axpy(R, Vec(spec.dim, 1.0), x0)};
    Grid grid = Grid::ball_grid(box, cfg.grid.at("nx").get<int>(), x0, R);
    grid.cfl_safety = cfg.grid.value("cfl_safety", 0.9);
    set_dt(grid, spec, cfg);

    const auto init_fn = make_shape(cfg.initial);
    const auto lateral = make_boundary(cfg.boundary);
    const GridFunction u0 = sample(grid, init_fn);

    double level = -std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < grid.node_count(); ++idx)
        if (grid.inside(idx))
            level = std::max(level,
                             std::max(u0.values[idx],
                                      lateral(grid.coord(idx), 0.0)));

    const EvolutionTrace trace = evolve(spec, grid, u0, lateral, t2);

    CsvTable gap_table{"gap", {"t", "gap"}, {}};
    const double gap_start = run.tol("gap_start");
    double min_gap = std::numeric_limits<double>::infinity();
    const size_t stride = std::max<size_t>(1, trace.levels.size() / 200);
    for (size_t m = 0; m < trace.levels.size(); ++m) {
        const double gap = level - interior_max(grid, trace.levels[m]);
        if (trace.times[m] >= gap_start)
            min_gap = std::min(min_gap, gap);
        if (m % stride == 0 || m + 1 == trace.levels.size())
            gap_table.rows.push_back({trace.times[m], gap});
    }
    run.check(min_gap > run.tol("gap_min"),
              "interior max reached the level M after the grace time");

    // Barrier-based contradiction quantity with the certified beta.
    const double t_prime = 0.5 * t2;
    const long lvl = nearest_level(trace, t_prime);
    const double alpha =
        level - interior_max(grid, trace.levels[lvl]);
    run.check(alpha > 0.0, "no positive axis deficit to feed the barrier");

    const double b_sup = spec.coeffs.b_sup;
    const double c_abs = spec.coeffs.c_abs_sup;
    const double K =
        compute_K(spec.lambda, spec.Lambda, spec.dim, b_sup, c_abs, r0);
    const BetaSelection sel = select_beta(spec.lambda, K, r0);
    BarrierParams bp;
    bp.n = spec.dim;
    bp.x0 = x0;
    bp.t_prime = trace.times[lvl];
    bp.r0 = r0;
    bp.alpha = std::max(alpha, 1e-12);
    bp.beta = sel.beta;
    bp.cap = std::max(level, 0.0);
    const BarrierCertificate cert = certify_strict_supersolution(
        bp, spec.lambda, spec.Lambda, b_sup, c_abs, t2,
        cfg.geometry.value("cert_grid", 32));
    run.check(cert.pass, "barrier supersolution certificate failed");

    const double v_top =
        bp.cap - bp.alpha * std::pow(r0, 4) *
                     std::exp(-bp.beta * (t2 - bp.t_prime));
    run.check(v_top < level, "barrier top value does not force a contradiction");
    const double final_gap = level - interior_max(grid, trace.levels.back());
    run.check(final_gap >= bp.cap - v_top,
              "final gap below the barrier-predicted deficit");

    run.rep.metrics["level"] = level;
    run.rep.metrics["min_gap_after_start"] = min_gap;
    run.rep.metrics["final_gap"] = final_gap;
    run.rep.metrics["alpha"] = bp.alpha;
    run.rep.metrics["barrier_top_value"] = v_top;
    run.rep.certificate = {{"K", cert.K},         {"c_nlL", cert.c_nlL},
                           {"delta", cert.delta}, {"beta", cert.beta},
                           {"margin", cert.margin}, {"samples", cert.samples}};
    run.rep.tables.push_back(std::move(gap_table));
}

void run_inclined(Run& run) {
    const auto& cfg = run.cfg;
    const Vec eta = cfg.geometry.at("eta").get<Vec>();
    const double t1 = cfg.geometry.value("t1", 0.0);
    const double t_end = cfg.geometry.at("t_end").get<double>();

    OperatorSpec spec = make_operator(cfg.operator_desc);

    // Straightened-frame operator via the tilt transform: the substitution
    // x~ = x - eta (t - t1) turns u_t = F into u_t = F + eta . Du.
    InclinedCylinder ic;
    ic.base.x0 = Vec(spec.dim, 0.0);
    ic.base.radius = cfg.geometry.value("half_width", 1.0);
    ic.base.t1 = t1;
    ic.base.t2 = t1 + t_end;
    ic.eta = eta;
    const TiltResult tilt = tilt_transform(ic);

    json straight_desc = cfg.operator_desc;
    straight_desc["advect"] = tilt.drift;
    OperatorSpec spec_straight = make_operator(straight_desc);

    // Pointwise covariance of the operator under the change of variables,
    // on quadratic space-time polynomials with exact derivative fields.
    Rng rng(cfg.seed);
    double cov_err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const SymMat a = rng.symmetric(spec.dim, 1.0);
        const Vec d = rng.vec(spec.dim, -1.0, 1.0);
        const Vec e = rng.vec(spec.dim, -1.0, 1.0);
        const double c0 = rng.uniform(-1.0, 1.0);
        const Vec xt = rng.vec(spec.dim, -1.0, 1.0); // x~ sample
        const double t = t1 + t_end * rng.uniform();
        const Vec x = axpy(t - t1, eta, xt);

        const double uval = a.quad(x) + dot(d, x) + t * dot(e, x) + c0 * t * t;
        Vec du = a.apply(x);
        for (int i = 0; i < spec.dim; ++i)
            du[i] = 2.0 * du[i] + d[i] + t * e[i];
        const double ut = dot(e, x) + 2.0 * t * c0;
        const SymMat hess = a.scaled(2.0);

        const double lhs = eval_operator(spec, x, t, uval, du, hess) - ut;
        const double ut_tilde = ut + dot(eta, du);
        const double rhs =
            eval_operator(spec_straight, xt, t, uval, du, hess) - ut_tilde;
        cov_err = std::max(cov_err, std::abs(lhs - rhs));
    }
    run.check(cov_err <= run.tol("covariance_tol"),
              "operator evaluation does not commute with the tilt transform");

    // Dual evolution: tilted frame (original operator) vs straightened frame
    // (drift-augmented operator); the frames coincide at nodes shifted by
    // eta * t_end, which the default parameters make an exact cell count.
    auto dual_run = [&](int nx) {
        Grid grid = build_box_grid(cfg, spec.dim);
        grid = Grid::box_grid(grid.box, nx);
        grid.cfl_safety = cfg.grid.value("cfl_safety", 0.9);
        grid.dt = std::min(max_stable_dt(spec, grid),
                           max_stable_dt(spec_straight, grid));
        const GridFunction u0 = sample(grid, make_shape(cfg.initial));
        const auto lateral = make_boundary(cfg.boundary);
        EvolutionTrace tilted = evolve(spec, grid, u0, lateral, t_end);
        EvolutionTrace straight = evolve(spec_straight, grid, u0, lateral, t_end);
        return std::tuple{grid, std::move(tilted), std::move(straight)};
    };

    const int nx = cfg.grid.at("nx").get<int>();
    auto [grid, tilted, straight] = dual_run(nx);
    auto [grid_f, tilted_f, straight_f] = dual_run(2 * (nx - 1) + 1);

    Vec shift_cells(spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
        shift_cells[i] = eta[i] * t_end / grid.h;
        run.check(std::abs(shift_cells[i] - std::lround(shift_cells[i])) < 1e-9,
                  "eta * t_end is not an integer number of cells");
    }

    auto shifted_index = [&](const Grid& g, long idx, const Vec& cells) -> long {
        int i = static_cast<int>(idx % g.nx) +
                static_cast<int>(std::lround(cells[0]));
        int j = static_cast<int>(idx / g.nx);
        if (g.n == 2)
            j += static_cast<int>(std::lround(cells[1]));
        if (i < 0 || i >= g.nx || j < 0 || j >= (g.n == 2 ? g.nx : 1))
            return -1;
        return g.index(i, j);
    };

    double diff = 0.0;
    const auto& u_t = tilted.levels.back();
    const auto& u_s = straight.levels.back();
    for (long idx = 0; idx < grid.node_count(); ++idx) {
        if (grid.mask[idx] != NodeKind::interior)
            continue;
        const long sidx = shifted_index(grid, idx, shift_cells);
        if (sidx < 0 || grid.mask[sidx] != NodeKind::interior)
            continue;
        // straight solution at x~ equals tilted solution at x~ + eta t.
        diff = std::max(diff,
                        std::abs(u_s.values[idx] - u_t.values[sidx]));
    }

    // Scheme self-error by grid refinement, per run, at coincident nodes.
    auto self_error = [&](const EvolutionTrace& coarse,
                          const EvolutionTrace& fine) {
        double err = 0.0;
        const auto& uc = coarse.levels.back();
        const auto& uf = fine.levels.back();
        for (long idx = 0; idx < grid.node_count(); ++idx) {
            if (grid.mask[idx] != NodeKind::interior)
                continue;
            const int i = static_cast<int>(idx % grid.nx);
            const int j = grid.n == 2 ? static_cast<int>(idx / grid.nx) : 0;
            const long fidx = grid_f.index(2 * i, 2 * j);
            err = std::max(err,
                           std::abs(uc.values[idx] - uf.values[fidx]));
        }
        return err;
    };
    const double self_err =
        self_error(tilted, tilted_f) + self_error(straight, straight_f);
    run.check(diff <= run.tol("self_error_factor") * self_err,
              "tilted and straightened traces disagree beyond scheme error");

    run.rep.metrics["covariance_max_err"] = cov_err;
    run.rep.metrics["trace_diff"] = diff;
    run.rep.metrics["scheme_self_error"] = self_err;

    CsvTable profile{"tilt_profile", {"x", "tilted_shifted", "straight"}, {}};
    const int jmid = grid.n == 2 ? (grid.nx - 1) / 2 : 0;
    for (int i = 0; i < grid.nx; ++i) {
        const long idx = grid.index(i, jmid);
        const long sidx = shifted_index(grid, idx, shift_cells);
        if (sidx < 0)
            continue;
        profile.rows.push_back({grid.coord(idx)[0], u_t.values[sidx],
                                u_s.values[idx]});
    }
    run.rep.tables.push_back(std::move(profile));
}

void run_broken_line(Run& run) {
    const auto& cfg = run.cfg;
    OperatorSpec spec = make_operator(cfg.operator_desc);

    BrokenLine line;
    for (const auto& v : cfg.geometry.at("vertices"))
        line.vertices.emplace_back(v.at("x").get<Vec>(),
                                   v.at("t").get<double>());
    line.validate();

    Grid grid = build_box_grid(cfg, spec.dim);
    set_dt(grid, spec, cfg);
    const CylinderChain chain = cover_broken_line(
        line, cfg.geometry.at("radius").get<double>(), 16,
        std::optional<Box>(grid.box));
    const double t_end = line.vertices.back().second;
    const double level = run.tol("level");

    // Constant run: u == M propagates exactly (c == 0, F(...,0,0,0) = 0).
    const GridFunction const0 =
        sample(grid, [level](const Vec&) { return level; });
    const SpaceTimeFn const_lat = [level](const Vec&, double) { return level; };
    const EvolutionTrace const_trace = evolve(spec, grid, const0, const_lat, t_end);
    double const_dev = 0.0;
    for (const auto& lvl : const_trace.levels)
        for (long idx = 0; idx < grid.node_count(); ++idx)
            if (grid.inside(idx))
                const_dev = std::max(const_dev,
                                     std::abs(lvl.values[idx] - level));
    run.check(const_dev <= run.tol("constant_dev"),
              "constant solution did not propagate exactly");

    // Perturbed run: strict gap at every axis sample point after the
    // propagation grace time.
    const GridFunction u0 = sample(grid, make_shape(cfg.initial));
    const EvolutionTrace trace =
        evolve(spec, grid, u0, make_boundary(cfg.boundary), t_end);

    CsvTable axis_table{"axis_gap", {"t", "x0", "x1", "gap"}, {}};
    const double t_prop = run.tol("t_prop");
    double min_axis_gap = std::numeric_limits<double>::infinity();
    bool axis_covered = true;
    for (const auto& seg : chain.segments) {
        for (int s = 0; s <= 16; ++s) {
            const double t =
                seg.base.t1 + (seg.base.t2 - seg.base.t1) * s / 16.0;
            const Vec x = seg.axis_at(t);
            if (t > seg.base.t1 && t < seg.base.t2 &&
                !contains(chain.segments, x, t))
                axis_covered = false;
            if (t < t_prop)
                continue;
            const long lvl = nearest_level(trace, t);
            const long idx = nearest_node(grid, x);
            const double gap =
                level - trace.levels[lvl].values[idx];
            min_axis_gap = std::min(min_axis_gap, gap);
            axis_table.rows.push_back(
                {t, x[0], spec.dim == 2 ? x[1] : 0.0, gap});
        }
    }
    run.check(axis_covered, "chain does not cover its own axis points");
    run.check(min_axis_gap > run.tol("gap_min"),
              "perturbed run reached the level at an axis point");

    run.rep.metrics["constant_max_dev"] = const_dev;
    run.rep.metrics["min_axis_gap"] = min_axis_gap;
    run.rep.metrics["chain_segments"] =
        static_cast<long>(chain.segments.size());
    run.rep.tables.push_back(std::move(axis_table));
}

void run_strong_comparison(Run& run) {
    const auto& cfg = run.cfg;
    OperatorSpec spec = make_operator(cfg.operator_desc);
    Grid grid = build_box_grid(cfg, spec.dim);
    set_dt(grid, spec, cfg);
    const double t_end = cfg.geometry.at("t_end").get<double>();
    const double gap = cfg.geometry.at("gap").get<double>();

    // v starts above u but with a genuinely different profile, so the
    // difference w = u - v is non-constant.
    const auto base = make_shape(cfg.initial);
    const GridFunction u0 = sample(grid, base);
    const GridFunction v0 =
        sample(grid, [&](const Vec& x) { return 0.5 * base(x) + gap; });
    const SpaceTimeFn lat_u = make_boundary(cfg.boundary);
    const SpaceTimeFn lat_v = [&](const Vec& x, double t) {
        return 0.5 * lat_u(x, t) + gap;
    };

    const ComparisonReport cmp =
        discrete_comparison(spec, grid, u0, v0, lat_u, lat_v, t_end);
    run.check(cmp.cfl_ok, "comparison run unexpectedly violated CFL");
    run.check(cmp.ordered && cmp.max_violation <= run.tol("order_tol"),
              "ordering u <= v was lost during the evolution");

    // w = u - v is a discrete subsolution of the extremal equation.
    const EvolutionTrace tu = evolve(spec, grid, u0, lat_u, t_end);
    const EvolutionTrace tv = evolve(spec, grid, v0, lat_v, t_end);
    EvolutionTrace tw = tu;
    double w_max = -std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < tw.levels.size(); ++m)
        for (long idx = 0; idx < grid.node_count(); ++idx) {
            tw.levels[m].values[idx] -= tv.levels[m].values[idx];
            if (grid.inside(idx))
                w_max = std::max(w_max, tw.levels[m].values[idx]);
        }
    OperatorSpec pucci = spec;
    pucci.kind = OperatorKind::pucci_plus;
    pucci.coeffs = CoefficientField::constants(spec.coeffs.b_sup, 0.0);
    const ResidualReport res = residual(pucci, grid, tw, ResidualMode::sub);
    run.check(res.worst >= -run.tol("sub_residual_tol"),
              "difference is not a discrete extremal subsolution");
    run.check(w_max <= run.tol("order_tol"), "difference became positive");

    // Identical data: the difference vanishes identically.
    const EvolutionTrace tu2 = evolve(spec, grid, u0, lat_u, t_end);
    double ident = 0.0;
    for (size_t m = 0; m < tu.levels.size(); ++m)
        for (long idx = 0; idx < grid.node_count(); ++idx)
            if (grid.inside(idx))
                ident = std::max(ident,
                                 std::abs(tu.levels[m].values[idx] -
                                          tu2.levels[m].values[idx]));
    run.check(ident <= run.tol("identical_tol"),
              "identical runs produced different trajectories");

    run.rep.metrics["max_order_violation"] = cmp.max_violation;
    run.rep.metrics["w_max"] = w_max;
    run.rep.metrics["w_sub_residual_worst"] = res.worst;
    run.rep.metrics["identical_max_dev"] = ident;
}

void run_positivity(Run& run) {
    const auto& cfg = run.cfg;
    OperatorSpec spec = make_operator(cfg.operator_desc);
    Grid grid = build_box_grid(cfg, spec.dim);
    set_dt(grid, spec, cfg);
    const double t_end = cfg.geometry.at("t_end").get<double>();

    const GridFunction u0 = sample(grid, make_shape(cfg.initial));
    double u0_min = std::numeric_limits<double>::infinity();
    double u0_max = -std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < grid.node_count(); ++idx)
        if (grid.inside(idx)) {
            u0_min = std::min(u0_min, u0.values[idx]);
            u0_max = std::max(u0_max, u0.values[idx]);
        }
    run.check(u0_min >= 0.0 && u0_max > 0.0,
              "initial data must be nonnegative and not identically zero");

    const EvolutionTrace trace =
        evolve(spec, grid, u0, make_boundary(cfg.boundary), t_end);

    CsvTable table{"interior_min", {"t", "min_interior"}, {}};
    const double t_pos = run.tol("t_pos");
    double worst = std::numeric_limits<double>::infinity();
    const size_t stride = std::max<size_t>(1, trace.levels.size() / 200);
    for (size_t m = 0; m < trace.levels.size(); ++m) {
        const double mn = interior_min(grid, trace.levels[m]);
        if (trace.times[m] >= t_pos)
            worst = std::min(worst, mn);
        if (m % stride == 0 || m + 1 == trace.levels.size())
            table.rows.push_back({trace.times[m], mn});
    }
    run.check(worst > run.tol("positivity_min"),
              "interior minimum failed to become strictly positive");

    run.rep.metrics["min_interior_after_tpos"] = worst;
    run.rep.tables.push_back(std::move(table));
}

void run_truncated_counterexample(Run& run) {
    const auto& cfg = run.cfg;
    OperatorSpec spec = make_operator(cfg.operator_desc);
    Grid grid = build_box_grid(cfg, spec.dim);

    // Stationary witness u(x) = x_n^2: a valid supersolution of the
    // truncated minus operator with an interior, non-constant minimum.
    const auto witness = make_shape(cfg.initial);
    const EvolutionTrace trace = static_trace(grid, witness);
    const ResidualReport res = residual(spec, grid, trace, ResidualMode::super);
    run.check(std::abs(res.worst) <= run.tol("residual_tol"),
              "witness super-residual is not zero");

    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    bool min_interior_hit = false;
    for (long idx = 0; idx < grid.node_count(); ++idx) {
        if (!grid.inside(idx))
            continue;
        const double v = trace.levels[0].values[idx];
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    for (long idx = 0; idx < grid.node_count(); ++idx)
        if (grid.mask[idx] == NodeKind::interior &&
            trace.levels[0].values[idx] == mn)
            min_interior_hit = true;
    run.check(mn == 0.0, "witness minimum is not zero");
    run.check(min_interior_hit, "witness minimum is not attained in the interior");
    run.check(mx > mn, "witness is constant");

    run.rep.metrics["super_residual"] = res.worst;
    run.rep.metrics["min_value"] = mn;
    run.rep.metrics["max_value"] = mx;
    run.rep.metrics["outcome"] =
        "strong minimum principle violated by a valid supersolution";
}

void run_elliptic_reduction(Run& run) {
    const auto& cfg = run.cfg;
    OperatorSpec spec = make_operator(cfg.operator_desc);
    Grid grid = build_box_grid(cfg, spec.dim);
    set_dt(grid, spec, cfg);
    const double t_end = cfg.geometry.at("t_end").get<double>();

    // A stationary elliptic solution fed as time-independent parabolic data.
    const auto stationary = make_shape(cfg.initial);
    const GridFunction u0 = sample(grid, stationary);
    const EvolutionTrace trace =
        evolve(spec, grid, u0, make_boundary(cfg.boundary), t_end);

    double drift = 0.0;
    for (const auto& lvl : trace.levels)
        for (long idx = 0; idx < grid.node_count(); ++idx)
            if (grid.inside(idx))
                drift = std::max(drift,
                                 std::abs(lvl.values[idx] - u0.values[idx]));
    run.check(drift <= run.tol("drift_tol"),
              "stationary solution drifted in time");

    double bmax = -std::numeric_limits<double>::infinity();
    for (long idx = 0; idx < grid.node_count(); ++idx)
        if (grid.mask[idx] == NodeKind::boundary)
            bmax = std::max(bmax, u0.values[idx]);
    const double imax = interior_max(grid, trace.levels.back());
    run.check(imax < bmax,
              "non-constant elliptic solution attains its max in the interior");

    run.rep.metrics["drift_max"] = drift;
    run.rep.metrics["interior_max"] = imax;
    run.rep.metrics["boundary_max"] = bmax;
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.experiment = config.experiment;
    rep.pass = true;
    rep.certificate = nullptr;
    Run run{config, rep};

    if (config.experiment == "axis_strictness")
        run_axis_strictness(run);
    else if (config.experiment == "inclined")
        run_inclined(run);
    else if (config.experiment == "broken_line")
        run_broken_line(run);
    else if (config.experiment == "strong_comparison")
        run_strong_comparison(run);
    else if (config.experiment == "positivity")
        run_positivity(run);
    else if (config.experiment == "truncated_counterexample")
        run_truncated_counterexample(run);
    else if (config.experiment == "elliptic_reduction")
        run_elliptic_reduction(run);
    else
        throw std::invalid_argument("unknown experiment: " + config.experiment);
    return rep;
}

std::vector<std::string> emit_report(const ExperimentReport& report,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> paths;

    std::vector<std::string> artifact_names;
    for (const auto& table : report.tables) {
        const fs::path p = fs::path(out_dir) / (table.name + ".csv");
        std::ofstream out(p, std::ios::binary); // LF line endings
        if (!out)
            throw std::runtime_error("emit_report: cannot write " + p.string());
        for (size_t i = 0; i < table.header.size(); ++i)
            out << (i ? "," : "") << table.header[i];
        out << "\n";
        char buf[32];
        for (const auto& row : table.rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
                out << (i ? "," : "") << buf;
            }
            out << "\n";
        }
        artifact_names.push_back(p.filename().string());
        paths.push_back(p.string());
    }

    ordered_json j;
    j["experiment"] = report.experiment;
    j["pass"] = report.pass;
    j["metrics"] = report.metrics;
    j["failures"] = report.failures;
    j["artifacts"] = artifact_names;
    j["certificate"] = report.certificate;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ",
                  std::gmtime(&now));
    j["timestamp"] = stamp;

    const fs::path rp = fs::path(out_dir) / "report.json";
    std::ofstream out(rp, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_report: cannot write " + rp.string());
    out << j.dump(2) << "\n";
    paths.push_back(rp.string());
    return paths;
}

} // namespace smplab::lab
