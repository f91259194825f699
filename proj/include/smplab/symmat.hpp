#ifndef SMPLAB_SYMMAT_HPP
#define SMPLAB_SYMMAT_HPP

#include <cstddef>
#include <vector>

namespace smplab {

/// Dense symmetric n x n matrix. Each off-diagonal entry is stored once
/// (packed upper triangle, row-major).
class SymMat {
public:
    explicit SymMat(int n);

    static SymMat identity(int n);
    static SymMat diagonal(const std::vector<double>& d);
    /// v (x) v, the rank-one projector scaled by |v|^2.
    static SymMat outer(const std::vector<double>& v);
    /// G^T G for a dense rows x n matrix G (always positive semidefinite).
    static SymMat gram(const std::vector<std::vector<double>>& g);
    /// Builds from a full dense matrix; throws if not symmetric to 1e-12.
    static SymMat from_dense(const std::vector<std::vector<double>>& rows);

    int dim() const { return n_; }
    double operator()(int i, int j) const { return coeffs_[index(i, j)]; }
    double& at(int i, int j) { return coeffs_[index(i, j)]; }

    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool finite() const;

    /// Quadratic form <M v, v>.
    double quad(const std::vector<double>& v) const;
    /// Matrix-vector product.
    std::vector<double> apply(const std::vector<double>& v) const;

    SymMat operator+(const SymMat& other) const;
    SymMat operator-(const SymMat& other) const;
    SymMat scaled(double t) const;

private:
    int index(int i, int j) const;

    int n_;
    std::vector<double> coeffs_;
};

/// Eigenvalues sorted ascending.
struct EigenDecomp {
    std::vector<double> values;
};

/// Cyclic Jacobi to absolute off-diagonal tolerance 1e-12 * (1 + max|m|).
/// Intended for the small dimensions used here (n <= 8 in experiments).
EigenDecomp eigenvalues(const SymMat& m);

enum class PucciSign { plus, minus };

/// Pucci extremal operator M^+/M^- with ellipticity band [lam, Lam]:
/// sup/inf of Tr(A m) over lam*I <= A <= Lam*I.
double pucci_extremal(PucciSign sign, double lam, double Lam, const SymMat& m);

/// Truncated (degenerate) Pucci operator over k eigenvalues: the k smallest
/// for the minus operator, the k largest for the plus operator. k = n
/// reproduces pucci_extremal.
double pucci_truncated(PucciSign sign, double lam, double Lam, int k,
                       const SymMat& m);

} // namespace smplab

#endif
