#ifndef SMPLAB_GEOMETRY_HPP
#define SMPLAB_GEOMETRY_HPP

#include <optional>
#include <utility>
#include <vector>

#include "smplab/vec.hpp"

namespace smplab {

struct Box {
    Vec lo, hi;
    bool contains(const Vec& x) const;
};

/// Parabolic cylinder Q^{t1,t2}_{x0,R} = {|x - x0| < R, t1 < t < t2}.
struct Cylinder {
    Vec x0;
    double radius = 1.0;
    double t1 = 0.0, t2 = 1.0;

    void validate() const;
    bool contains(const Vec& x, double t) const; // open cylinder
};

/// Cylinder whose axis drifts with slope eta: |x - [x0 + eta (t - t1)]| < R.
struct InclinedCylinder {
    Cylinder base;
    Vec eta;

    Vec axis_at(double t) const;
    bool contains(const Vec& x, double t) const;
};

/// t-monotone polyline; the last vertex is the designated upper end-point.
struct BrokenLine {
    std::vector<std::pair<Vec, double>> vertices; // (x_i, t_i), t_i increasing

    void validate() const;
};

/// Inclined cylinders whose axes share junction points.
struct CylinderChain {
    std::vector<InclinedCylinder> segments;

    void validate() const; // junction continuity to 1e-12
};

struct TiltResult {
    Cylinder straightened;
    Vec drift; // eta; the straightened operator gains the term eta . Du
};

/// The tilting change of variables x~ = x - eta (t - t1): returns the
/// straightened cylinder and the drift to fold into the operator.
TiltResult tilt_transform(const InclinedCylinder& ic);

/// One inclined cylinder per segment, axis = the segment,
/// eta_i = (x_{i+1} - x_i) / (t_{i+1} - t_i). If a bounding domain is given,
/// the radius is halved (at most 20 times) until sampled chain points lie
/// inside it.
CylinderChain cover_broken_line(const BrokenLine& line, double radius,
                                int samples_per_segment = 16,
                                const std::optional<Box>& domain = std::nullopt);

/// Membership in the union of the (open) inclined cylinders.
bool contains(const std::vector<InclinedCylinder>& domain, const Vec& x,
              double t);

} // namespace smplab

#endif
