#include "smplab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace smplab {

bool Box::contains(const Vec& x) const {
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i])
            return false;
    return true;
}

void Cylinder::validate() const {
    if (!(radius > 0.0))
        throw std::invalid_argument("Cylinder: radius must be positive");
    if (!(t1 < t2))
        throw std::invalid_argument("Cylinder: require t1 < t2");
    if (x0.empty())
        throw std::invalid_argument("Cylinder: empty center");
}

bool Cylinder::contains(const Vec& x, double t) const {
    if (t <= t1 || t >= t2)
        return false;
    return norm(sub(x, x0)) < radius;
}

Vec InclinedCylinder::axis_at(double t) const {
    return axpy(t - base.t1, eta, base.x0);
}

bool InclinedCylinder::contains(const Vec& x, double t) const {
    if (t <= base.t1 || t >= base.t2)
        return false;
    return norm(sub(x, axis_at(t))) < base.radius;
}

void BrokenLine::validate() const {
    if (vertices.size() < 2)
        throw std::invalid_argument("BrokenLine: need at least two vertices");
    for (size_t i = 1; i < vertices.size(); ++i)
        if (!(vertices[i].second > vertices[i - 1].second))
            throw std::invalid_argument(
                "BrokenLine: times must be strictly increasing");
}

void CylinderChain::validate() const {
    for (size_t i = 1; i < segments.size(); ++i) {
        const auto& prev = segments[i - 1];
        const auto& cur = segments[i];
        if (std::abs(prev.base.t2 - cur.base.t1) > 1e-12)
            throw std::invalid_argument("CylinderChain: time junction mismatch");
        const Vec end = prev.axis_at(prev.base.t2);
        const Vec start = cur.base.x0;
        if (norm(sub(end, start)) > 1e-12)
            throw std::invalid_argument("CylinderChain: axis junction mismatch");
    }
}

TiltResult tilt_transform(const InclinedCylinder& ic) {
    ic.base.validate();
    TiltResult out;
    out.straightened = ic.base;
    out.drift = ic.eta.empty() ? Vec(ic.base.x0.size(), 0.0) : ic.eta;
    return out;
}

CylinderChain cover_broken_line(const BrokenLine& line, double radius,
                                int samples_per_segment,
                                const std::optional<Box>& domain) {
    line.validate();
    if (!(radius > 0.0))
        throw std::invalid_argument("cover_broken_line: radius must be positive");

    const int max_shrinks = 20;
    for (int attempt = 0; attempt <= max_shrinks; ++attempt, radius *= 0.5) {
        CylinderChain chain;
        for (size_t i = 0; i + 1 < line.vertices.size(); ++i) {
            const auto& [xa, ta] = line.vertices[i];
            const auto& [xb, tb] = line.vertices[i + 1];
            if (!(tb > ta))
                throw std::invalid_argument(
                    "cover_broken_line: zero-duration segment");
            InclinedCylinder ic;
            ic.base.x0 = xa;
            ic.base.t1 = ta;
            ic.base.t2 = tb;
            ic.base.radius = radius;
            ic.eta.resize(xa.size());
            for (size_t k = 0; k < xa.size(); ++k)
                ic.eta[k] = (xb[k] - xa[k]) / (tb - ta);
            chain.segments.push_back(std::move(ic));
        }
        chain.validate();
        if (!domain)
            return chain;

        bool fits = true;
        for (const auto& seg : chain.segments) {
            for (int j = 0; j <= samples_per_segment && fits; ++j) {
                const double t =
                    seg.base.t1 +
                    (seg.base.t2 - seg.base.t1) * j / samples_per_segment;
                const Vec axis = seg.axis_at(t);
                // Probe the lateral extent along each axis direction.
                for (size_t k = 0; k < axis.size() && fits; ++k) {
                    Vec probe = axis;
                    probe[k] = axis[k] + radius;
                    if (!domain->contains(probe))
                        fits = false;
                    probe[k] = axis[k] - radius;
                    if (!domain->contains(probe))
                        fits = false;
                }
            }
        }
        if (fits)
            return chain;
    }
    throw std::runtime_error(
        "cover_broken_line: no admissible radius after 20 shrink steps");
}

bool contains(const std::vector<InclinedCylinder>& domain, const Vec& x,
              double t) {
    for (const auto& ic : domain)
        if (ic.contains(x, t))
            return true;
    return false;
}

} // namespace smplab
