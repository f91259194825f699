// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smplab/barrier.hpp"
#include "smplab/lab.hpp"
#include "smplab/operators.hpp"
#include "smplab/rng.hpp"
#include "smplab/solver.hpp"
#include "smplab/symmat.hpp"

using namespace smplab;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(bool ok, const std::string& name) {
    std::printf("%s - %s\n", ok ? "PASS" : "FAIL", name.c_str());
    if (!ok)
        ++g_failures;
}

double pucci_brute(PucciSign sign, double lam, double Lam, const SymMat& m) {
    double best = sign == PucciSign::plus
                      ? -std::numeric_limits<double>::infinity()
                      : std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        const double theta = std::numbers::pi * it / 200.0;
        const double c = std::cos(theta), s = std::sin(theta);
        const double q1 =
            m(0, 0) * c * c + 2.0 * m(0, 1) * c * s + m(1, 1) * s * s;
        const double q2 =
            m(0, 0) * s * s - 2.0 * m(0, 1) * c * s + m(1, 1) * c * c;
        for (int ia = 0; ia < 40; ++ia) {
            const double a = lam + (Lam - lam) * ia / 39.0;
            for (int ib = 0; ib < 40; ++ib) {
                const double b = lam + (Lam - lam) * ib / 39.0;
                const double v = a * q1 + b * q2;
                best = sign == PucciSign::plus ? std::max(best, v)
                                               : std::min(best, v);
            }
        }
    }
    return best;
}

void check_pucci_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(101);
    bool ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const SymMat m = rng.symmetric(2, 2.0);
        for (PucciSign sign : {PucciSign::plus, PucciSign::minus}) {
            const double exact = pucci_extremal(sign, 1.0, 2.0, m);
            const double brute = pucci_brute(sign, 1.0, 2.0, m);
            // relative to the natural scale: the operator value may cancel
            // to near zero while the matrix itself is O(1)
            if (std::abs(exact - brute) >
                1e-2 * (1e-12 + std::abs(exact) + m.max_abs()))
                ok = false;
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report(ok && secs < 10.0, "pucci eigenvalue formula matches brute-force "
                              "extremum (100 matrices, < 10 s)");
}

void check_rank_one() {
    Rng rng(102);
    bool ok = true;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
        const double nu = rng.uniform(-3.0, 3.0);
        const double xi = rng.uniform(-3.0, 3.0);
        const Vec v = rng.unit_vec(n);
        const SymMat m =
            SymMat::identity(n).scaled(nu) + SymMat::outer(v).scaled(xi);
        std::vector<double> expected(n - 1, nu);
        expected.push_back(nu + xi);
        std::sort(expected.begin(), expected.end());
        const EigenDecomp e = eigenvalues(m);
        for (int i = 0; i < n; ++i)
            if (std::abs(e.values[i] - expected[i]) > 1e-10)
                ok = false;
    }
    report(ok, "rank-one update eigenvalues exact to 1e-10 (500 trials)");
}

void check_barrier_certificate() {
    const double lam = 1.0, Lam = 2.0, r0 = 0.4;
    const double b_sup = 1.0, c_abs = 1.0;
    const double K = compute_K(lam, Lam, 2, b_sup, c_abs, r0);
    const double K_formula =
        4.0 * lam * 1.0 + 4.0 * Lam + 4.0 * b_sup * r0 + c_abs * r0 * r0;
    bool ok = std::abs(K - K_formula) <= 1e-14;

    const BetaSelection sel = select_beta(lam, K, r0);
    const double threshold =
        (8.0 * lam + K) * (8.0 * lam + K) / (32.0 * lam * r0 * r0);
    ok = ok && std::abs(sel.beta - 2.0 * threshold) <= 1e-12 * threshold;

    BarrierParams bp;
    bp.n = 2;
    bp.x0 = {0.0, 0.0};
    bp.t_prime = 0.0;
    bp.r0 = r0;
    bp.alpha = 1.0;
    bp.beta = sel.beta;
    bp.cap = 1.0;
    const BarrierCertificate cert =
        certify_strict_supersolution(bp, lam, Lam, b_sup, c_abs, 0.3, 64);
    ok = ok && cert.pass && cert.margin > 0.0;

    // closed-form derivatives vs central finite differences
    Rng rng(103);
    const double h = 1e-4;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec x = rng.vec(2, -0.3, 0.3);
        const double t = rng.uniform(0.0, 0.3);
        const BarrierPoint p = barrier_eval(bp, x, t);
        for (int i = 0; i < 2; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (barrier_eval(bp, xp, t).value -
                               barrier_eval(bp, xm, t).value) /
                              (2.0 * h);
            if (std::abs(fd - p.grad[i]) > 1e-5)
                ok = false;
            for (int j = 0; j < 2; ++j) {
                Vec xpp = x, xpm = x, xmp = x, xmm = x;
                xpp[i] += h; xpp[j] += h;
                xpm[i] += h; xpm[j] -= h;
                xmp[i] -= h; xmp[j] += h;
                xmm[i] -= h; xmm[j] -= h;
                const double fd2 = (barrier_eval(bp, xpp, t).value -
                                    barrier_eval(bp, xpm, t).value -
                                    barrier_eval(bp, xmp, t).value +
                                    barrier_eval(bp, xmm, t).value) /
                                   (4.0 * h * h);
                if (std::abs(fd2 - p.hess(i, j)) > 1e-5)
                    ok = false;
            }
        }
    }

    // an undersized decay rate must be refused
    BarrierParams low = bp;
    low.beta = 0.9 * threshold;
    const BarrierCertificate rejected =
        certify_strict_supersolution(low, lam, Lam, b_sup, c_abs, 0.3, 48);
    ok = ok && !rejected.pass;

    report(ok, "barrier certificate (n=2, band [1,2], b=1, c=1, r0=0.4): "
               "K/beta formulas, 64^3 certification, FD derivatives, "
               "undersized beta refused");
}

void check_psi_sweep() {
    const double lam = 1.0, Lam = 2.0, r0 = 0.4;
    const double K = compute_K(lam, Lam, 2, 1.0, 1.0, r0);
    const BetaSelection sel = select_beta(lam, K, r0);
    double min_psi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100000; ++i) {
        const double s = r0 * r0 * i / 99999.0;
        min_psi = std::min(min_psi, psi(sel.beta, lam, K, r0, s));
    }
    const bool boundary_ok =
        std::abs(psi(sel.beta, lam, K, r0, 0.0) - 8.0 * lam * r0 * r0) <= 1e-12;
    report(min_psi > 0.0 && boundary_ok,
           "Psi positivity sweep (1e5 samples) and Psi(0) = 8 lam r0^2");
}

double heat_error(int nx) {
    const OperatorSpec spec = make_operator(
        json::parse(R"({"kind":"linear","lambda":1,"Lambda":1,"matrices":[[[1]]]})"));
    Grid grid = Grid::box_grid(Box{{0.0}, {1.0}}, nx);
    grid.dt = max_stable_dt(spec, grid);
    const auto u0 = sample(grid, [](const Vec& x) {
        return std::sin(std::numbers::pi * x[0]);
    });
    const SpaceTimeFn zero = [](const Vec&, double) { return 0.0; };
    const EvolutionTrace trace = evolve(spec, grid, u0, zero, 0.1);
    double err = 0.0;
    const double decay = std::exp(-std::numbers::pi * std::numbers::pi * 0.1);
    for (long idx = 0; idx < grid.node_count(); ++idx)
        err = std::max(err, std::abs(trace.levels.back().values[idx] -
                                     decay * std::sin(std::numbers::pi *
                                                      grid.coord(idx)[0])));
    return err;
}

void check_heat_convergence() {
    const double order = std::log2(heat_error(33) / heat_error(65));
    report(order >= 1.8,
           "1-D heat convergence order >= 1.8 between h=1/32 and h=1/64 "
           "(measured " + std::to_string(order) + ")");
}

void check_discrete_comparison() {
    const OperatorSpec spec = make_operator(json::parse(
        R"({"kind":"bellman","lambda":1,"Lambda":2,
            "matrices":[[[1,0],[0,2]],[[2,0],[0,1]],[[1.5,0],[0,1.5]]]})"));
    Grid grid = Grid::box_grid(Box{{-1.0, -1.0}, {1.0, 1.0}}, 17);
    grid.dt = max_stable_dt(spec, grid);

    Rng rng(104);
    const double a = rng.uniform(0.2, 0.6);
    auto low = [a](const Vec& x, double) {
        return a * std::cos(x[0]) * std::cos(x[1]);
    };
    auto high = [a, low](const Vec& x, double t) {
        return low(x, t) + 0.3 * (4.0 - x[0] * x[0] - x[1] * x[1]) / 4.0 + 0.1;
    };
    const auto u0 = sample(grid, [&](const Vec& x) { return low(x, 0.0); });
    const auto v0 = sample(grid, [&](const Vec& x) { return high(x, 0.0); });
    const ComparisonReport rep = discrete_comparison(
        spec, grid, u0, v0, low, high, 500.0 * grid.dt);
    const ComparisonReport bad = discrete_comparison(
        spec, grid, u0, v0, low, high, 50.0 * grid.dt, 10.0 * grid.dt);
    report(rep.cfl_ok && rep.ordered && rep.max_violation <= 1e-12 &&
               rep.steps_run >= 500 && !bad.cfl_ok,
           "discrete comparison: Bellman, 500 steps, max(u-v) <= 1e-12; "
           "CFL violation flagged");
}

void check_tilt_covariance() {
    const auto cfg = lab::ExperimentConfig::from_json(
        json::parse(R"({"experiment":"inclined"})"));
    const lab::ExperimentReport rep = lab::run_experiment(cfg);
    const double cov = rep.metrics.at("covariance_max_err").get<double>();
    const double diff = rep.metrics.at("trace_diff").get<double>();
    const double self = rep.metrics.at("scheme_self_error").get<double>();
    report(rep.pass && cov <= 1e-10 && diff <= 2.0 * self,
           "tilt covariance: operator commutes with the change of variables "
           "to 1e-10; traces agree within 2x scheme self-error");
}

void check_truncated_counterexample() {
    const auto cfg = lab::ExperimentConfig::from_json(
        json::parse(R"({"experiment":"truncated_counterexample"})"));
    const lab::ExperimentReport rep = lab::run_experiment(cfg);
    report(rep.pass && rep.metrics.at("super_residual") == 0.0 &&
               rep.metrics.at("min_value") == 0.0 &&
               rep.metrics.at("max_value").get<double>() > 0.0,
           "truncated-operator witness: super-residual exactly 0, interior "
           "minimum 0, non-constant");
}

void check_positivity() {
    const auto cfg = lab::ExperimentConfig::from_json(
        json::parse(R"({"experiment":"positivity"})"));
    const lab::ExperimentReport rep = lab::run_experiment(cfg);
    const double worst = rep.metrics.at("min_interior_after_tpos").get<double>();
    report(rep.pass && worst > 1e-12,
           "positivity conservation: interior minimum strictly positive from "
           "t = 0.05 (reported " + std::to_string(worst) + ")");
}

void check_structure_checker() {
    const OperatorSpec lin = make_operator(json::parse(
        R"({"kind":"linear","lambda":1,"Lambda":2,"matrices":[[[1.5,0],[0,1.5]]]})"));
    const OperatorSpec plap = make_operator(json::parse(
        R"({"kind":"normalized_p_laplacian","dim":2,"p":3.0})"));
    const bool pass_lin = check_structure_condition(lin, 10000, 2.0, 105).pass();
    const bool pass_plap =
        check_structure_condition(plap, 10000, 2.0, 105).pass();
    const bool band_ok = plap.lambda == 1.0 && plap.Lambda == 2.0;

    const RawOperatorFn cubic = [](const Vec&, double, double, const Vec&,
                                   const SymMat& m) {
        const double tr = m.trace();
        return tr * tr * tr;
    };
    const StructureReport viol =
        check_structure_condition(cubic, 2, 1.0, 2.0, 1000, 10.0, 105);
    report(pass_lin && pass_plap && band_ok && !viol.pass(),
           "structure checker: linear and p-Laplacian (p=3) pass 1e4 "
           "samples; Tr(M)^3 violation found within 1e3 samples");
}

} // namespace

int main() {
    check_pucci_oracle();
    check_rank_one();
    check_barrier_certificate();
    check_psi_sweep();
    check_heat_convergence();
    check_discrete_comparison();
    check_tilt_covariance();
    check_truncated_counterexample();
    check_positivity();
    check_structure_checker();
    if (g_failures > 0) {
        std::printf("%d acceptance check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance checks passed\n");
    return 0;
}
