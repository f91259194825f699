#ifndef SMPLAB_VEC_HPP
#define SMPLAB_VEC_HPP

#include <cmath>
#include <vector>

namespace smplab {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec axpy(double t, const Vec& a, const Vec& b) { // t*a + b
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        r[i] = t * a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i)
        r[i] = a[i] - b[i];
    return r;
}

} // namespace smplab

#endif
