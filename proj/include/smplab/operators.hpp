#ifndef SMPLAB_OPERATORS_HPP
#define SMPLAB_OPERATORS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smplab/symmat.hpp"
#include "smplab/vec.hpp"

namespace smplab {

/// Bounded zeroth/first-order coefficients b >= 0, c <= 0 and forcing f.
/// Every evaluation is checked against the declared bounds.
struct CoefficientField {
    std::function<double(const Vec&, double)> b;
    std::function<double(const Vec&, double)> c;
    std::function<double(const Vec&, double)> f;
    double b_sup = 0.0;
    double c_abs_sup = 0.0;
    bool has_forcing = false;

    CoefficientField();
    static CoefficientField constants(double b_val, double c_val,
                                      double f_val = 0.0);

    double b_at(const Vec& x, double t) const;
    double c_at(const Vec& x, double t) const;
    double f_at(const Vec& x, double t) const;
};

enum class OperatorKind {
    linear,
    bellman,
    isaacs,
    pucci_plus,
    pucci_minus,
    truncated_pucci,
    normalized_p_laplacian,
    lagrangian_mcf,
};

/// Convention for the normalized p-Laplacian at a vanishing gradient.
enum class GradZeroMode { reject, sub_envelope, symmetric };

std::string kind_name(OperatorKind kind);
OperatorKind kind_from_name(const std::string& name);

/// A catalog entry F(x,t,r,p,M). Immutable after construction.
struct OperatorSpec {
    OperatorKind kind = OperatorKind::pucci_plus;
    int dim = 0;
    double lambda = 1.0;
    double Lambda = 1.0;
    std::vector<SymMat> controls;              // bellman: sup over these
    std::vector<std::vector<SymMat>> controls2; // isaacs: sup_beta inf_alpha
    double p_exponent = 2.0;
    int trunc_k = 1;
    PucciSign trunc_sign = PucciSign::minus;
    double mcf_theta0 = 0.0;   // branch offset Theta > (n-2)pi/2 + theta0
    double mcf_eig_bound = 1.0; // compact eigenvalue interval [-E, E]
    GradZeroMode grad_zero = GradZeroMode::reject;
    CoefficientField coeffs;
    Vec advect; // signed first-order term advect . p (empty = none)

    /// Effective bound on the first-order coefficient, |advect| included.
    double first_order_bound() const;
};

/// Second-order principal part G(p, M) without coefficient terms.
double principal_value(const OperatorSpec& spec, const Vec& p, const SymMat& m);

/// Full evaluation F(x,t,r,p,M) = G(p,M) [+/- b|p| for the Pucci-class
/// kinds] + advect.p + c(x,t) r + f(x,t).
double eval_operator(const OperatorSpec& spec, const Vec& x, double t, double r,
                     const Vec& p, const SymMat& m);

/// Validated construction from a JSON descriptor. Throws std::invalid_argument
/// on unknown kinds, parameters outside the ellipticity band, p <= 1 or a
/// truncation index k >= dim.
OperatorSpec make_operator(const nlohmann::json& descriptor);

struct StructureSample {
    Vec x;
    double t = 0.0;
    double r = 0.0, s = 0.0;
    Vec p, q;
    SymMat m = SymMat(1);
    SymMat psd = SymMat(1);
    double lower_margin = 0.0;
    double upper_margin = 0.0;
};

struct StructureReport {
    long samples_checked = 0;
    double worst_lower_margin = 0.0;
    double worst_upper_margin = 0.0;
    std::vector<StructureSample> violations; // capped at 10 stored samples
    bool pass() const { return violations.empty(); }
};

/// Samples the uniform-parabolicity structure condition
///   lam Tr(N) - b|p-q| + c(r-s) <= F(x,t,r,p,M+N) - F(x,t,s,q,M)
///                               <= Lam Tr(N) + b|p-q| + c(r-s)
/// with N = G^T G. Deterministic given the seed. When the descriptor declares
/// b_sup = 0 the gradient slots are tied (q = p): the condition quantifies
/// gradient increments only through b.
StructureReport check_structure_condition(const OperatorSpec& spec,
                                          long n_samples, double scale,
                                          std::uint64_t seed);

/// Same sampling check for an arbitrary F(x,t,r,p,M) posited to be uniformly
/// parabolic with constants (lam, Lam) and b = c = 0; gradient and zeroth
/// slots are tied. Used to probe non-catalog operators.
using RawOperatorFn =
    std::function<double(const Vec&, double, double, const Vec&, const SymMat&)>;
StructureReport check_structure_condition(const RawOperatorFn& fn, int dim,
                                          double lam, double Lam,
                                          long n_samples, double scale,
                                          std::uint64_t seed);

} // namespace smplab

#endif
