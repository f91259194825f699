#ifndef SMPLAB_BARRIER_HPP
#define SMPLAB_BARRIER_HPP

#include "smplab/symmat.hpp"
#include "smplab/vec.hpp"

namespace smplab {

/// Parameters of the comparison barrier
///   v(x,t) = M - alpha e^{-beta (t - t')} [r0^2 - |x - x0|^2]^2.
struct BarrierParams {
    int n = 1;
    Vec x0;
    double t_prime = 0.0;
    double r0 = 0.5;  // requires 0 < r0 < 1
    double alpha = 1.0;
    double beta = 1.0;
    double cap = 0.0; // the attained maximum level M >= 0

    void validate() const;
};

struct BarrierPoint {
    double value = 0.0;
    double dt = 0.0; // time derivative
    Vec grad;
    SymMat hess = SymMat(1);
};

/// Closed-form value, time derivative, gradient and Hessian of the barrier.
BarrierPoint barrier_eval(const BarrierParams& params, const Vec& x, double t);

/// c_{n,lam,Lam} = 4 lam (n-1) + 4 Lam.
double barrier_c_const(double lam, double Lam, int n);

/// Bound K on the bundled first/zeroth-order coefficient:
/// K = c_{n,lam,Lam} + 4 b_sup r0 + c_abs_sup r0^2.
double compute_K(double lam, double Lam, int n, double b_sup, double c_abs_sup,
                 double r0);

/// The decay-rate polynomial in s = r0^2 - |x-x0|^2:
///   Psi(s) = beta s^2 - (8 lam + K) s + 8 lam r0^2.
double psi(double beta, double lam, double K, double r0, double s);

/// Exact minimum of Psi over s in [0, r0^2].
double psi_min(double beta, double lam, double K, double r0);

struct BetaSelection {
    double delta = 0.0;          // inner band: Psi > 0 for any beta when s <= delta
    double beta = 0.0;           // selected rate, 2x the positivity threshold
    double beta_threshold = 0.0; // (8 lam + K)^2 / (32 lam r0^2)
};

BetaSelection select_beta(double lam, double K, double r0);

struct BarrierCertificate {
    double K = 0.0;
    double c_nlL = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    double margin = 0.0; // min of Psi over [0, r0^2]; must be > 0 to pass
    long samples = 0;
    bool pass = false;
    double worst_excess = 0.0; // max of residual + alpha e^{-beta tau} margin
    Vec worst_x;
    double worst_t = 0.0;
};

/// Samples the closed cylinder |x - x0| <= r0, t in [t_prime, t2] and asserts
/// at every node, for c in {0, -c_abs_sup},
///   M^+(D^2 v) + b_sup |Dv| + c v - dv/dt <= -alpha e^{-beta (t-t')} margin.
/// The Pucci value of D^2 v is computed both from the proof's two-regime
/// closed form and from the eigenvalue route; they must agree to 1e-9.
BarrierCertificate certify_strict_supersolution(const BarrierParams& params,
                                                double lam, double Lam,
                                                double b_sup, double c_abs_sup,
                                                double t2, int grid_pts = 64);

} // namespace smplab

#endif
