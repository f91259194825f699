#include "smplab/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smplab {

void BarrierParams::validate() const {
    if (n < 1)
        throw std::invalid_argument("BarrierParams: n >= 1 required");
    if (static_cast<int>(x0.size()) != n)
        throw std::invalid_argument("BarrierParams: x0 size mismatch");
    if (!(r0 > 0.0) || !(r0 < 1.0))
        throw std::invalid_argument("BarrierParams: require 0 < r0 < 1");
    if (!(alpha > 0.0) || !(beta > 0.0) || cap < 0.0)
        throw std::invalid_argument(
            "BarrierParams: require alpha > 0, beta > 0, cap >= 0");
}

BarrierPoint barrier_eval(const BarrierParams& params, const Vec& x, double t) {
    params.validate();
    if (t < params.t_prime)
        throw std::invalid_argument("barrier_eval: t < t_prime");
    const int n = params.n;
    Vec d(n);
    double rho2 = 0.0;
    for (int i = 0; i < n; ++i) {
        d[i] = x[i] - params.x0[i];
        rho2 += d[i] * d[i];
    }
    const double s = params.r0 * params.r0 - rho2;
    const double decay = params.alpha * std::exp(-params.beta * (t - params.t_prime));

    BarrierPoint bp;
    bp.value = params.cap - decay * s * s;
    bp.dt = params.beta * decay * s * s;
    bp.grad.resize(n);
    for (int i = 0; i < n; ++i)
        bp.grad[i] = 4.0 * decay * s * d[i];
    // D^2 v = -decay * D^2 phi, D^2 phi = 8 (x-x0)(x)(x-x0) - 4 s I.
    bp.hess = SymMat(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j)
            bp.hess.at(i, j) = -decay * 8.0 * d[i] * d[j];
        bp.hess.at(i, i) += decay * 4.0 * s;
    }
    return bp;
}

double barrier_c_const(double lam, double Lam, int n) {
    return 4.0 * lam * (n - 1) + 4.0 * Lam;
}

double compute_K(double lam, double Lam, int n, double b_sup, double c_abs_sup,
                 double r0) {
    if (!(lam > 0.0) || Lam < lam || b_sup < 0.0 || c_abs_sup < 0.0)
        throw std::invalid_argument("compute_K: bad coefficients");
    if (!(r0 > 0.0) || !(r0 < 1.0))
        throw std::invalid_argument("compute_K: require 0 < r0 < 1");
    return barrier_c_const(lam, Lam, n) + 4.0 * b_sup * r0 + c_abs_sup * r0 * r0;
}

double psi(double beta, double lam, double K, double r0, double s) {
    return beta * s * s - (8.0 * lam + K) * s + 8.0 * lam * r0 * r0;
}

double psi_min(double beta, double lam, double K, double r0) {
    const double s_max = r0 * r0;
    double m = std::min(psi(beta, lam, K, r0, 0.0),
                        psi(beta, lam, K, r0, s_max));
    if (beta > 0.0) {
        const double vertex = (8.0 * lam + K) / (2.0 * beta);
        if (vertex > 0.0 && vertex < s_max)
            m = std::min(m, psi(beta, lam, K, r0, vertex));
    }
    return m;
}

BetaSelection select_beta(double lam, double K, double r0) {
    if (!(lam > 0.0) || K < 0.0 || !(r0 > 0.0) || !(r0 < 1.0))
        throw std::invalid_argument("select_beta: bad parameters");
    BetaSelection sel;
    sel.beta_threshold =
        (8.0 * lam + K) * (8.0 * lam + K) / (32.0 * lam * r0 * r0);
    sel.beta = 2.0 * sel.beta_threshold;
    // Half the small-root bound: Psi(s) > 0 for every beta > 0 when s <= delta.
    sel.delta = 8.0 * lam * r0 * r0 / (2.0 * (8.0 * lam + K));
    return sel;
}

namespace {

// M^-(D^2 phi) from the proof's two-regime split. The eigenvalues of D^2 phi
// are -4s with multiplicity n-1 and 12 rho^2 - 4 r0^2.
double pucci_minus_phi_closed(double lam, double Lam, int n, double rho2,
                              double r0) {
    const double s = r0 * r0 - rho2;
    const double e2 = 12.0 * rho2 - 4.0 * r0 * r0;
    if (e2 <= 0.0) // rho^2 <= r0^2 / 3: all eigenvalues nonpositive
        return Lam * (8.0 * rho2 - 4.0 * n * s);
    return lam * e2 - 4.0 * Lam * (n - 1) * s;
}

} // namespace

BarrierCertificate certify_strict_supersolution(const BarrierParams& params,
                                                double lam, double Lam,
                                                double b_sup, double c_abs_sup,
                                                double t2, int grid_pts) {
    params.validate();
    if (t2 <= params.t_prime)
        throw std::invalid_argument("certify: t2 must exceed t_prime");
    if (grid_pts < 2)
        throw std::invalid_argument("certify: grid_pts >= 2");

    BarrierCertificate cert;
    cert.c_nlL = barrier_c_const(lam, Lam, params.n);
    cert.K = compute_K(lam, Lam, params.n, b_sup, c_abs_sup, params.r0);
    const BetaSelection sel = select_beta(lam, cert.K, params.r0);
    cert.delta = sel.delta;
    cert.beta = params.beta;
    cert.margin = psi_min(params.beta, lam, cert.K, params.r0);
    cert.pass = cert.margin > 0.0;
    cert.worst_excess = -std::numeric_limits<double>::infinity();

    const int n = params.n;
    const double r0 = params.r0;
    long strides = 1;
    for (int i = 0; i < n; ++i)
        strides *= grid_pts;

    for (long flat = 0; flat < strides; ++flat) {
        Vec x(n);
        long rest = flat;
        double rho2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const int idx = static_cast<int>(rest % grid_pts);
            rest /= grid_pts;
            x[i] = params.x0[i] - r0 + 2.0 * r0 * idx / (grid_pts - 1);
            rho2 += (x[i] - params.x0[i]) * (x[i] - params.x0[i]);
        }
        if (rho2 > r0 * r0 * (1.0 + 1e-12))
            continue;

        for (int it = 0; it < grid_pts; ++it) {
            const double t =
                params.t_prime + (t2 - params.t_prime) * it / (grid_pts - 1);
            const BarrierPoint bp = barrier_eval(params, x, t);
            const double decay =
                params.alpha * std::exp(-params.beta * (t - params.t_prime));

            const double pucci_eig =
                pucci_extremal(PucciSign::plus, lam, Lam, bp.hess);
            const double pucci_closed =
                -decay * pucci_minus_phi_closed(lam, Lam, n, rho2, r0);
            if (std::abs(pucci_eig - pucci_closed) >
                1e-9 * (1.0 + std::abs(pucci_eig) + std::abs(pucci_closed)))
                cert.pass = false;

            const double bound = -decay * cert.margin;
            for (const double c : {0.0, -c_abs_sup}) {
                const double res =
                    pucci_eig + b_sup * norm(bp.grad) + c * bp.value - bp.dt;
                const double excess = res - bound;
                ++cert.samples;
                if (excess > cert.worst_excess) {
                    cert.worst_excess = excess;
                    cert.worst_x = x;
                    cert.worst_t = t;
                }
                if (excess > 1e-9 * (1.0 + std::abs(res) + std::abs(bound)))
                    cert.pass = false;
            }
        }
    }
    return cert;
}

} // namespace smplab
