#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "smplab/geometry.hpp"
#include "smplab/rng.hpp"

using namespace smplab;

TEST_CASE("cylinder membership") {
    Cylinder c{{0.0, 0.0}, 1.0, 0.0, 1.0};
    c.validate();
    CHECK(c.contains({0.0, 0.0}, 0.5));
    CHECK(!c.contains({0.0, 0.0}, 0.0)); // open in time
    CHECK(!c.contains({1.0, 0.0}, 0.5)); // open in space
    CHECK(!c.contains({0.0, 0.0}, 2.0));

    Cylinder bad{{0.0}, 1.0, 1.0, 0.5};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("inclined cylinder axis") {
    InclinedCylinder ic;
    ic.base = {{0.0, 0.0}, 0.5, 0.0, 2.0};
    ic.eta = {1.0, 0.0};
    const Vec a = ic.axis_at(1.5);
    CHECK(a[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(a[1] == 0.0);
    CHECK(ic.contains(ic.axis_at(1.0), 1.0));
    CHECK(!ic.contains({0.0, 0.0}, 1.5)); // axis has moved 1.5 away
}

TEST_CASE("tilt transform") {
    InclinedCylinder ic;
    ic.base = {{0.25, -0.5}, 0.7, 0.1, 0.9};
    ic.eta = {0.0, 0.0};
    const TiltResult id = tilt_transform(ic);
    CHECK(id.straightened.x0 == ic.base.x0);
    CHECK(norm(id.drift) == 0.0);

    ic.eta = {1.0, 0.0};
    const TiltResult tr = tilt_transform(ic);
    CHECK(tr.drift == ic.eta);
    // axis point maps to x0 for all t: x~ = x - eta (t - t1)
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = rng.uniform(ic.base.t1, ic.base.t2);
        const Vec axis = ic.axis_at(t);
        const Vec xt = axpy(-(t - ic.base.t1), ic.eta, axis);
        CHECK(norm(sub(xt, ic.base.x0)) <= 1e-14);
        // round trip
        const Vec back = axpy(t - ic.base.t1, ic.eta, xt);
        CHECK(norm(sub(back, axis)) <= 1e-14);
    }

    // gradients of the substituted quadratic agree with the original:
    // u(x) = |x|^2, u~(x~, t) = |x~ + eta (t - t1)|^2
    for (int trial = 0; trial < 20; ++trial) {
        const Vec xt = rng.vec(2, -1.0, 1.0);
        const double t = rng.uniform(ic.base.t1, ic.base.t2);
        const Vec x = axpy(t - ic.base.t1, ic.eta, xt);
        const Vec grad_u = {2.0 * x[0], 2.0 * x[1]};       // Du at x
        const Vec grad_ut = {2.0 * x[0], 2.0 * x[1]};      // D~u~ at x~
        CHECK(norm(sub(grad_u, grad_ut)) <= 1e-12);
        // value correspondence
        CHECK(dot(x, x) == doctest::Approx(dot(x, x)).epsilon(1e-15));
    }
}

TEST_CASE("broken line validation") {
    BrokenLine good;
    good.vertices = {{{0.0, 0.0}, 0.0}, {{1.0, 0.0}, 1.0}};
    CHECK_NOTHROW(good.validate());

    BrokenLine bad;
    bad.vertices = {{{0.0, 0.0}, 0.0}, {{1.0, 0.0}, 0.0}}; // zero duration
    CHECK_THROWS(bad.validate());
}

TEST_CASE("cover_broken_line basic shapes") {
    // vertical segment: one cylinder with zero drift
    BrokenLine vertical;
    vertical.vertices = {{{0.2, 0.3}, 0.0}, {{0.2, 0.3}, 1.0}};
    const CylinderChain c1 = cover_broken_line(vertical, 0.3);
    REQUIRE(c1.segments.size() == 1);
    CHECK(norm(c1.segments[0].eta) == 0.0);
    CHECK(c1.segments[0].base.radius == doctest::Approx(0.3));

    // unit slope in 1-D
    BrokenLine slope;
    slope.vertices = {{{0.0}, 0.0}, {{1.0}, 1.0}};
    const CylinderChain c2 = cover_broken_line(slope, 0.3);
    REQUIRE(c2.segments.size() == 1);
    CHECK(c2.segments[0].eta[0] == doctest::Approx(1.0).epsilon(1e-15));

    // two segments with a junction at (1, 1)
    BrokenLine two;
    two.vertices = {{{0.0}, 0.0}, {{1.0}, 1.0}, {{1.0}, 2.0}};
    const CylinderChain c3 = cover_broken_line(two, 0.3);
    REQUIRE(c3.segments.size() == 2);
    CHECK(norm(c3.segments[1].eta) == 0.0);
    CHECK(c3.segments[0].axis_at(1.0)[0] == doctest::Approx(1.0));
    CHECK(c3.segments[1].axis_at(1.0)[0] == doctest::Approx(1.0));
    CHECK_NOTHROW(c3.validate());

    // axes reproduce the vertices exactly
    for (size_t i = 0; i + 1 < two.vertices.size(); ++i) {
        const auto& seg = c3.segments[i];
        CHECK(norm(sub(seg.axis_at(two.vertices[i].second),
                       two.vertices[i].first)) <= 1e-14);
        CHECK(norm(sub(seg.axis_at(two.vertices[i + 1].second),
                       two.vertices[i + 1].first)) <= 1e-14);
    }
}

TEST_CASE("chain containment and radius shrink") {
    BrokenLine line;
    line.vertices = {{{0.0, 0.0}, 0.0}, {{0.5, 0.0}, 0.5}, {{0.5, 0.0}, 1.0}};
    const CylinderChain chain = cover_broken_line(line, 0.25);

    // interior axis samples lie in the union
    for (const auto& seg : chain.segments)
        for (int s = 1; s < 16; ++s) {
            const double t =
                seg.base.t1 + (seg.base.t2 - seg.base.t1) * s / 16.0;
            CHECK(contains(chain.segments, seg.axis_at(t), t));
        }
    CHECK(!contains(chain.segments, {0.0, 0.0}, 5.0)); // t out of range

    // a tight domain forces the radius down
    Box tight{{-0.1, -0.1}, {0.6, 0.1}};
    const CylinderChain shrunk =
        cover_broken_line(line, 0.25, 16, std::optional<Box>(tight));
    for (const auto& seg : shrunk.segments)
        CHECK(seg.base.radius < 0.25);

    // an impossible domain is rejected after the shrink limit
    Box impossible{{10.0, 10.0}, {11.0, 11.0}};
    CHECK_THROWS(cover_broken_line(line, 0.25, 16,
                                   std::optional<Box>(impossible)));
}
