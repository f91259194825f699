#include "smplab/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smplab {

SymMat::SymMat(int n) : n_(n) {
    if (n < 1)
        throw std::invalid_argument("SymMat: dimension must be >= 1");
    coeffs_.assign(static_cast<size_t>(n) * (n + 1) / 2, 0.0);
}

int SymMat::index(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::out_of_range("SymMat: index out of range");
    if (i > j)
        std::swap(i, j);
    return i * n_ - i * (i - 1) / 2 + (j - i);
}

SymMat SymMat::identity(int n) {
    SymMat m(n);
    for (int i = 0; i < n; ++i)
        m.at(i, i) = 1.0;
    return m;
}

SymMat SymMat::diagonal(const std::vector<double>& d) {
    SymMat m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i)
        m.at(i, i) = d[i];
    return m;
}

SymMat SymMat::outer(const std::vector<double>& v) {
    SymMat m(static_cast<int>(v.size()));
    for (int i = 0; i < m.n_; ++i)
        for (int j = i; j < m.n_; ++j)
            m.at(i, j) = v[i] * v[j];
    return m;
}

SymMat SymMat::gram(const std::vector<std::vector<double>>& g) {
    if (g.empty())
        throw std::invalid_argument("SymMat::gram: empty factor");
    const int n = static_cast<int>(g.front().size());
    SymMat m(n);
    for (const auto& row : g) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("SymMat::gram: ragged factor");
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                m.at(i, j) += row[i] * row[j];
    }
    return m;
}

SymMat SymMat::from_dense(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    SymMat m(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("SymMat::from_dense: not square");
        for (int j = i; j < n; ++j) {
            if (std::abs(rows[i][j] - rows[j][i]) > 1e-12)
                throw std::invalid_argument("SymMat::from_dense: not symmetric");
            m.at(i, j) = 0.5 * (rows[i][j] + rows[j][i]);
        }
    }
    return m;
}

double SymMat::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i)
        t += (*this)(i, i);
    return t;
}

double SymMat::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
}

double SymMat::max_abs() const {
    double m = 0.0;
    for (double c : coeffs_)
        m = std::max(m, std::abs(c));
    return m;
}

bool SymMat::finite() const {
    for (double c : coeffs_)
        if (!std::isfinite(c))
            return false;
    return true;
}

double SymMat::quad(const std::vector<double>& v) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            s += (*this)(i, j) * v[i] * v[j];
    return s;
}

std::vector<double> SymMat::apply(const std::vector<double>& v) const {
    std::vector<double> out(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            out[i] += (*this)(i, j) * v[j];
    return out;
}

SymMat SymMat::operator+(const SymMat& other) const {
    if (other.n_ != n_)
        throw std::invalid_argument("SymMat: dimension mismatch");
    SymMat m(n_);
    for (size_t k = 0; k < coeffs_.size(); ++k)
        m.coeffs_[k] = coeffs_[k] + other.coeffs_[k];
    return m;
}

SymMat SymMat::operator-(const SymMat& other) const {
    if (other.n_ != n_)
        throw std::invalid_argument("SymMat: dimension mismatch");
    SymMat m(n_);
    for (size_t k = 0; k < coeffs_.size(); ++k)
        m.coeffs_[k] = coeffs_[k] - other.coeffs_[k];
    return m;
}

SymMat SymMat::scaled(double t) const {
    SymMat m(n_);
    for (size_t k = 0; k < coeffs_.size(); ++k)
        m.coeffs_[k] = t * coeffs_[k];
    return m;
}

EigenDecomp eigenvalues(const SymMat& m) {
    if (!m.finite())
        throw std::invalid_argument("eigenvalues: non-finite input");
    const int n = m.dim();

    // Work on a full dense copy.
    std::vector<double> a(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[i * n + j] = m(i, j);

    const double tol = 1e-12 * (1.0 + m.max_abs());
    const int max_sweeps = 64;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q)
                off = std::max(off, std::abs(a[p * n + q]));
        if (off <= tol)
            break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= tol * 1e-3)
                    continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    EigenDecomp d;
    d.values.resize(n);
    for (int i = 0; i < n; ++i)
        d.values[i] = a[i * n + i];
    std::sort(d.values.begin(), d.values.end());
    return d;
}

namespace {

void check_band(double lam, double Lam) {
    if (!(lam > 0.0) || Lam < lam)
        throw std::invalid_argument("pucci: require 0 < lambda <= Lambda");
}

// Eigenvalues below this magnitude are treated as zero; their contribution
// is coefficient-independent.
double zero_cut(const SymMat& m) { return 1e-12 * (1.0 + m.max_abs()); }

} // namespace

double pucci_extremal(PucciSign sign, double lam, double Lam, const SymMat& m) {
    check_band(lam, Lam);
    if (!m.finite())
        throw std::invalid_argument("pucci_extremal: non-finite input");
    const double cut = zero_cut(m);
    const double pos_w = (sign == PucciSign::plus) ? Lam : lam;
    const double neg_w = (sign == PucciSign::plus) ? lam : Lam;
    double s = 0.0;
    for (double e : eigenvalues(m).values) {
        if (e > cut)
            s += pos_w * e;
        else if (e < -cut)
            s += neg_w * e;
    }
    return s;
}

double pucci_truncated(PucciSign sign, double lam, double Lam, int k,
                       const SymMat& m) {
    check_band(lam, Lam);
    if (k < 1 || k > m.dim())
        throw std::invalid_argument("pucci_truncated: k out of range");
    if (!m.finite())
        throw std::invalid_argument("pucci_truncated: non-finite input");
    const double cut = zero_cut(m);
    const auto vals = eigenvalues(m).values; // ascending
    const double pos_w = (sign == PucciSign::plus) ? Lam : lam;
    const double neg_w = (sign == PucciSign::plus) ? lam : Lam;
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        // minus: the k smallest; plus: the k largest.
        const double e =
            (sign == PucciSign::minus) ? vals[i] : vals[m.dim() - 1 - i];
        if (e > cut)
            s += pos_w * e;
        else if (e < -cut)
            s += neg_w * e;
    }
    return s;
}

} // namespace smplab
