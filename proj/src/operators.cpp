#include "smplab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "smplab/rng.hpp"

namespace smplab {

namespace {

double trace_prod(const SymMat& a, const SymMat& m) {
    double s = 0.0;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
            s += a(i, j) * m(i, j);
    return s;
}

constexpr double kGradEps = 1e-14;

} // namespace

CoefficientField::CoefficientField()
    : b([](const Vec&, double) { return 0.0; }),
      c([](const Vec&, double) { return 0.0; }),
      f([](const Vec&, double) { return 0.0; }) {}

CoefficientField CoefficientField::constants(double b_val, double c_val,
                                             double f_val) {
    if (b_val < 0.0)
        throw std::invalid_argument("CoefficientField: b must be >= 0");
    if (c_val > 0.0)
        throw std::invalid_argument("CoefficientField: c must be <= 0");
    CoefficientField cf;
    cf.b = [b_val](const Vec&, double) { return b_val; };
    cf.c = [c_val](const Vec&, double) { return c_val; };
    cf.f = [f_val](const Vec&, double) { return f_val; };
    cf.b_sup = b_val;
    cf.c_abs_sup = -c_val;
    cf.has_forcing = f_val != 0.0;
    return cf;
}

double CoefficientField::b_at(const Vec& x, double t) const {
    const double v = b(x, t);
    if (v < 0.0 || v > b_sup + 1e-12 * (1.0 + b_sup))
        throw std::runtime_error("CoefficientField: b(x,t) outside [0, b_sup]");
    return v;
}

double CoefficientField::c_at(const Vec& x, double t) const {
    const double v = c(x, t);
    if (v > 0.0 || v < -c_abs_sup - 1e-12 * (1.0 + c_abs_sup))
        throw std::runtime_error(
            "CoefficientField: c(x,t) outside [-c_abs_sup, 0]");
    return v;
}

double CoefficientField::f_at(const Vec& x, double t) const { return f(x, t); }

std::string kind_name(OperatorKind kind) {
    switch (kind) {
    case OperatorKind::linear: return "linear";
    case OperatorKind::bellman: return "bellman";
    case OperatorKind::isaacs: return "isaacs";
    case OperatorKind::pucci_plus: return "pucci_plus";
    case OperatorKind::pucci_minus: return "pucci_minus";
    case OperatorKind::truncated_pucci: return "truncated_pucci";
    case OperatorKind::normalized_p_laplacian: return "normalized_p_laplacian";
    case OperatorKind::lagrangian_mcf: return "lagrangian_mcf";
    }
    throw std::logic_error("kind_name: unreachable");
}

OperatorKind kind_from_name(const std::string& name) {
    for (auto k : {OperatorKind::linear, OperatorKind::bellman,
                   OperatorKind::isaacs, OperatorKind::pucci_plus,
                   OperatorKind::pucci_minus, OperatorKind::truncated_pucci,
                   OperatorKind::normalized_p_laplacian,
                   OperatorKind::lagrangian_mcf})
        if (kind_name(k) == name)
            return k;
    throw std::invalid_argument("unknown operator kind: " + name);
}

double OperatorSpec::first_order_bound() const {
    return coeffs.b_sup + (advect.empty() ? 0.0 : norm(advect));
}

double principal_value(const OperatorSpec& spec, const Vec& p,
                       const SymMat& m) {
    switch (spec.kind) {
    case OperatorKind::linear:
        return trace_prod(spec.controls.front(), m);
    case OperatorKind::bellman: {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : spec.controls)
            best = std::max(best, trace_prod(a, m));
        return best;
    }
    case OperatorKind::isaacs: {
        double outer = -std::numeric_limits<double>::infinity();
        for (const auto& row : spec.controls2) {
            double inner = std::numeric_limits<double>::infinity();
            for (const auto& a : row)
                inner = std::min(inner, trace_prod(a, m));
            outer = std::max(outer, inner);
        }
        return outer;
    }
    case OperatorKind::pucci_plus:
        return pucci_extremal(PucciSign::plus, spec.lambda, spec.Lambda, m);
    case OperatorKind::pucci_minus:
        return pucci_extremal(PucciSign::minus, spec.lambda, spec.Lambda, m);
    case OperatorKind::truncated_pucci:
        return pucci_truncated(spec.trunc_sign, spec.lambda, spec.Lambda,
                               spec.trunc_k, m);
    case OperatorKind::normalized_p_laplacian: {
        const double pn = norm(p);
        if (pn < kGradEps) {
            if (m.max_abs() == 0.0)
                return 0.0;
            const auto vals = eigenvalues(m).values;
            switch (spec.grad_zero) {
            case GradZeroMode::reject:
                throw std::domain_error(
                    "normalized_p_laplacian: vanishing gradient");
            case GradZeroMode::sub_envelope: {
                const double fac = spec.p_exponent - 2.0;
                const double e = fac >= 0.0 ? vals.front() : vals.back();
                return m.trace() + fac * e;
            }
            case GradZeroMode::symmetric:
                return m.trace();
            }
        }
        Vec unit(p);
        for (double& u : unit)
            u /= pn;
        return m.trace() + (spec.p_exponent - 2.0) * m.quad(unit);
    }
    case OperatorKind::lagrangian_mcf: {
        double s = 0.0;
        for (double e : eigenvalues(m).values)
            s += std::atan(e);
        return s;
    }
    }
    throw std::logic_error("principal_value: unreachable");
}

double eval_operator(const OperatorSpec& spec, const Vec& x, double t, double r,
                     const Vec& p, const SymMat& m) {
    double v = principal_value(spec, p, m);
    if (spec.kind == OperatorKind::pucci_plus)
        v += spec.coeffs.b_at(x, t) * norm(p);
    else if (spec.kind == OperatorKind::pucci_minus)
        v -= spec.coeffs.b_at(x, t) * norm(p);
    if (!spec.advect.empty())
        v += dot(spec.advect, p);
    v += spec.coeffs.c_at(x, t) * r + spec.coeffs.f_at(x, t);
    return v;
}

namespace {

SymMat parse_matrix(const nlohmann::json& rows) {
    std::vector<std::vector<double>> dense;
    for (const auto& row : rows)
        dense.push_back(row.get<std::vector<double>>());
    return SymMat::from_dense(dense);
}

void check_control_band(const SymMat& a, double lam, double Lam) {
    const auto vals = eigenvalues(a).values;
    const double tol = 1e-9 * (1.0 + a.max_abs());
    if (vals.front() < lam - tol || vals.back() > Lam + tol)
        throw std::invalid_argument(
            "make_operator: control matrix outside the ellipticity band");
}

} // namespace

OperatorSpec make_operator(const nlohmann::json& d) {
    static const std::vector<std::string> allowed = {
        "kind", "lambda", "Lambda", "dim", "b", "c", "f", "advect",
        "grad_zero", "matrices", "matrix_grid", "p", "k", "sign",
        "theta0", "eig_bound"};
    for (auto it = d.begin(); it != d.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("make_operator: unknown key '" +
                                        it.key() + "'");
    if (!d.contains("kind"))
        throw std::invalid_argument("make_operator: missing 'kind'");

    OperatorSpec spec;
    spec.kind = kind_from_name(d.at("kind").get<std::string>());
    spec.coeffs = CoefficientField::constants(d.value("b", 0.0),
                                              d.value("c", 0.0),
                                              d.value("f", 0.0));
    if (d.contains("advect"))
        spec.advect = d.at("advect").get<Vec>();
    if (d.contains("grad_zero")) {
        const std::string mode = d.at("grad_zero").get<std::string>();
        if (mode == "reject")
            spec.grad_zero = GradZeroMode::reject;
        else if (mode == "sub_envelope")
            spec.grad_zero = GradZeroMode::sub_envelope;
        else if (mode == "symmetric")
            spec.grad_zero = GradZeroMode::symmetric;
        else
            throw std::invalid_argument("make_operator: unknown grad_zero mode");
    }

    switch (spec.kind) {
    case OperatorKind::linear: {
        spec.controls.push_back(parse_matrix(d.at("matrices").at(0)));
        spec.dim = spec.controls.front().dim();
        spec.lambda = d.at("lambda").get<double>();
        spec.Lambda = d.at("Lambda").get<double>();
        check_control_band(spec.controls.front(), spec.lambda, spec.Lambda);
        break;
    }
    case OperatorKind::bellman: {
        spec.lambda = d.at("lambda").get<double>();
        spec.Lambda = d.at("Lambda").get<double>();
        for (const auto& rows : d.at("matrices"))
            spec.controls.push_back(parse_matrix(rows));
        if (spec.controls.empty())
            throw std::invalid_argument("make_operator: empty control set");
        spec.dim = spec.controls.front().dim();
        for (const auto& a : spec.controls)
            check_control_band(a, spec.lambda, spec.Lambda);
        break;
    }
    case OperatorKind::isaacs: {
        spec.lambda = d.at("lambda").get<double>();
        spec.Lambda = d.at("Lambda").get<double>();
        for (const auto& row : d.at("matrix_grid")) {
            std::vector<SymMat> inner;
            for (const auto& rows : row)
                inner.push_back(parse_matrix(rows));
            if (inner.empty())
                throw std::invalid_argument("make_operator: empty control row");
            spec.controls2.push_back(std::move(inner));
        }
        if (spec.controls2.empty())
            throw std::invalid_argument("make_operator: empty control grid");
        spec.dim = spec.controls2.front().front().dim();
        for (const auto& row : spec.controls2)
            for (const auto& a : row)
                check_control_band(a, spec.lambda, spec.Lambda);
        break;
    }
    case OperatorKind::pucci_plus:
    case OperatorKind::pucci_minus: {
        spec.lambda = d.at("lambda").get<double>();
        spec.Lambda = d.at("Lambda").get<double>();
        spec.dim = d.at("dim").get<int>();
        break;
    }
    case OperatorKind::truncated_pucci: {
        spec.lambda = d.at("lambda").get<double>();
        spec.Lambda = d.at("Lambda").get<double>();
        spec.dim = d.at("dim").get<int>();
        spec.trunc_k = d.at("k").get<int>();
        if (spec.trunc_k < 1 || spec.trunc_k >= spec.dim)
            throw std::invalid_argument(
                "make_operator: truncated Pucci requires 1 <= k < dim");
        if (d.contains("sign"))
            spec.trunc_sign = d.at("sign").get<std::string>() == "plus"
                                  ? PucciSign::plus
                                  : PucciSign::minus;
        break;
    }
    case OperatorKind::normalized_p_laplacian: {
        spec.dim = d.at("dim").get<int>();
        spec.p_exponent = d.at("p").get<double>();
        if (spec.p_exponent <= 1.0)
            throw std::invalid_argument("make_operator: require p > 1");
        spec.lambda = std::min(1.0, spec.p_exponent - 1.0);
        spec.Lambda = std::max(1.0, spec.p_exponent - 1.0);
        break;
    }
    case OperatorKind::lagrangian_mcf: {
        spec.dim = d.at("dim").get<int>();
        spec.mcf_theta0 = d.value("theta0", 0.1);
        spec.mcf_eig_bound = d.value("eig_bound", 1.0);
        if (spec.mcf_theta0 <= 0.0 || spec.mcf_eig_bound <= 0.0)
            throw std::invalid_argument(
                "make_operator: require theta0 > 0 and eig_bound > 0");
        // Effective constants on the compact eigenvalue interval [-E, E].
        spec.lambda = 1.0 / (1.0 + spec.mcf_eig_bound * spec.mcf_eig_bound);
        spec.Lambda = 1.0;
        break;
    }
    }
    if (spec.dim < 1)
        throw std::invalid_argument("make_operator: dimension must be >= 1");
    if (!(spec.lambda > 0.0) || spec.Lambda < spec.lambda)
        throw std::invalid_argument("make_operator: require 0 < lambda <= Lambda");
    if (!spec.advect.empty() &&
        static_cast<int>(spec.advect.size()) != spec.dim)
        throw std::invalid_argument("make_operator: advect size mismatch");

    // Degenerate-slot identity F(x,t,0,0,0) = 0 (with f == 0).
    if (!spec.coeffs.has_forcing) {
        Rng rng(7);
        for (int i = 0; i < 8; ++i) {
            const Vec x = rng.vec(spec.dim, -1.0, 1.0);
            const double t = rng.uniform();
            const double v = eval_operator(spec, x, t, 0.0, Vec(spec.dim, 0.0),
                                           SymMat(spec.dim));
            if (std::abs(v) > 1e-12)
                throw std::invalid_argument(
                    "make_operator: F(x,t,0,0,0) != 0 at a sampled point");
        }
    }
    return spec;
}

namespace {

// Conjugates diag(d) by a handful of random plane rotations.
SymMat rotated_diagonal(Rng& rng, const std::vector<double>& d) {
    const int n = static_cast<int>(d.size());
    std::vector<std::vector<double>> full(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        full[i][i] = d[i];
    const int sweeps = std::max(1, n - 1);
    for (int s = 0; s < sweeps; ++s) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
                const double c = std::cos(th), sn = std::sin(th);
                for (int k = 0; k < n; ++k) {
                    const double akp = full[k][p], akq = full[k][q];
                    full[k][p] = c * akp - sn * akq;
                    full[k][q] = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = full[p][k], aqk = full[q][k];
                    full[p][k] = c * apk - sn * aqk;
                    full[q][k] = sn * apk + c * aqk;
                }
            }
    }
    // Symmetrize away rounding drift.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (full[i][j] + full[j][i]);
            full[i][j] = full[j][i] = v;
        }
    return SymMat::from_dense(full);
}

} // namespace

StructureReport check_structure_condition(const OperatorSpec& spec,
                                          long n_samples, double scale,
                                          std::uint64_t seed) {
    if (n_samples < 1)
        throw std::invalid_argument("check_structure_condition: n_samples >= 1");
    if (!(scale > 0.0))
        throw std::invalid_argument("check_structure_condition: scale > 0");

    const int n = spec.dim;
    Rng rng(seed);
    StructureReport report;
    report.worst_lower_margin = std::numeric_limits<double>::infinity();
    report.worst_upper_margin = std::numeric_limits<double>::infinity();
    const bool tie_gradients = spec.first_order_bound() == 0.0;
    const bool p_lap = spec.kind == OperatorKind::normalized_p_laplacian;
    const bool mcf = spec.kind == OperatorKind::lagrangian_mcf;

    for (long i = 0; i < n_samples; ++i) {
        StructureSample smp;
        smp.x = rng.vec(n, -1.0, 1.0);
        smp.t = rng.uniform();
        smp.r = rng.uniform(-scale, scale);
        smp.s = rng.uniform(-scale, scale);
        smp.p = rng.vec(n, -scale, scale);
        if (p_lap) // route around the gradient singularity
            while (norm(smp.p) < 0.1 * scale)
                smp.p = rng.vec(n, -scale, scale);
        smp.q = tie_gradients ? smp.p : rng.vec(n, -scale, scale);

        if (mcf) {
            // Base Hessian with eigenvalues in [-E, E], restricted to the
            // uniformly parabolic branch sum(arctan e_i) >= (n-2)pi/2 + theta0.
            const double E = spec.mcf_eig_bound;
            const double branch =
                (n - 2) * std::numbers::pi / 2.0 + spec.mcf_theta0;
            std::vector<double> diag;
            double theta, emax;
            do {
                diag = rng.vec(n, -E, E);
                theta = 0.0;
                emax = -E;
                for (double v : diag) {
                    theta += std::atan(v);
                    emax = std::max(emax, v);
                }
            } while (theta < branch);
            smp.m = rotated_diagonal(rng, diag);
            smp.psd = rng.psd(n, scale);
            // Keep eigenvalues of M + N inside [-E, E].
            const double headroom = std::max(0.0, E - emax);
            const double tr = smp.psd.trace();
            if (tr > headroom)
                smp.psd = smp.psd.scaled(tr > 0.0 ? 0.9 * headroom / tr : 0.0);
        } else {
            smp.m = rng.symmetric(n, scale);
            smp.psd = rng.psd(n, scale);
        }

        const double tr_n = smp.psd.trace();
        const double b_chk = spec.coeffs.b_at(smp.x, smp.t) +
                             (spec.advect.empty() ? 0.0 : norm(spec.advect));
        const double c_chk = spec.coeffs.c_at(smp.x, smp.t);
        const double grad_gap = norm(sub(smp.p, smp.q));
        const double zero_gap = c_chk * (smp.r - smp.s);

        const double mid = eval_operator(spec, smp.x, smp.t, smp.r, smp.p,
                                         smp.m + smp.psd) -
                           eval_operator(spec, smp.x, smp.t, smp.s, smp.q,
                                         smp.m);
        const double lhs = spec.lambda * tr_n - b_chk * grad_gap + zero_gap;
        const double rhs = spec.Lambda * tr_n + b_chk * grad_gap + zero_gap;

        smp.lower_margin = mid - lhs;
        smp.upper_margin = rhs - mid;
        report.worst_lower_margin =
            std::min(report.worst_lower_margin, smp.lower_margin);
        report.worst_upper_margin =
            std::min(report.worst_upper_margin, smp.upper_margin);
        const double tol =
            1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs) + std::abs(mid));
        if (smp.lower_margin < -tol || smp.upper_margin < -tol) {
            if (report.violations.size() < 10)
                report.violations.push_back(smp);
        }
        ++report.samples_checked;
    }
    return report;
}

StructureReport check_structure_condition(const RawOperatorFn& fn, int dim,
                                          double lam, double Lam,
                                          long n_samples, double scale,
                                          std::uint64_t seed) {
    if (n_samples < 1 || !(scale > 0.0) || !(lam > 0.0) || Lam < lam)
        throw std::invalid_argument("check_structure_condition: bad parameters");
    Rng rng(seed);
    StructureReport report;
    report.worst_lower_margin = std::numeric_limits<double>::infinity();
    report.worst_upper_margin = std::numeric_limits<double>::infinity();
    for (long i = 0; i < n_samples; ++i) {
        StructureSample smp;
        smp.x = rng.vec(dim, -1.0, 1.0);
        smp.t = rng.uniform();
        smp.r = smp.s = rng.uniform(-scale, scale);
        smp.p = rng.vec(dim, -scale, scale);
        smp.q = smp.p;
        smp.m = rng.symmetric(dim, scale);
        smp.psd = rng.psd(dim, scale);
        const double tr_n = smp.psd.trace();
        const double mid = fn(smp.x, smp.t, smp.r, smp.p, smp.m + smp.psd) -
                           fn(smp.x, smp.t, smp.s, smp.q, smp.m);
        const double lhs = lam * tr_n;
        const double rhs = Lam * tr_n;
        smp.lower_margin = mid - lhs;
        smp.upper_margin = rhs - mid;
        report.worst_lower_margin =
            std::min(report.worst_lower_margin, smp.lower_margin);
        report.worst_upper_margin =
            std::min(report.worst_upper_margin, smp.upper_margin);
        const double tol =
            1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs) + std::abs(mid));
        if (smp.lower_margin < -tol || smp.upper_margin < -tol) {
            if (report.violations.size() < 10)
                report.violations.push_back(smp);
        }
        ++report.samples_checked;
    }
    return report;
}

} // namespace smplab
