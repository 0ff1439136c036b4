#include <cmath>
#include <random>

#include "doctest.h"
#include "hgroup/group.hpp"

using namespace hg;

namespace {

Point rnd(std::mt19937_64& r, int n, double s = 2.0) {
    std::uniform_real_distribution<double> u(-s, s);
    Point p(n);
    for (auto& v : p) v = u(r);
    return p;
}

double maxdiff(const Point& a, const Point& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
    return m;
}

}  // namespace

TEST_CASE("heisenberg law matches [x,y,t].[u,v,w] = [x+u, y+v, t+w+2(yu-xv)]") {
    auto H = heisenberg(1);
    CHECK(H.hom_dim() == 4);
    CHECK(H.norm_exponent() == 4);
    auto z = mul(H, {1, 0, 0}, {0, 1, 0});
    CHECK(z[0] == doctest::Approx(1.0));
    CHECK(z[1] == doctest::Approx(1.0));
    CHECK(z[2] == doctest::Approx(-2.0));
    std::mt19937_64 r(1);
    for (int i = 0; i < 200; ++i) {
        auto a = rnd(r, 3), b = rnd(r, 3);
        auto c = mul(H, a, b);
        CHECK(c[2] == doctest::Approx(a[2] + b[2] + 2 * (a[1] * b[0] - a[0] * b[1])).epsilon(1e-13));
    }
}

TEST_CASE("heisenberg(2) law and fields") {
    auto H = heisenberg(2);
    CHECK(H.hom_dim() == 6);
    std::mt19937_64 r(2);
    auto a = rnd(r, 5), b = rnd(r, 5);
    auto c = mul(H, a, b);
    double dot = a[2] * b[0] + a[3] * b[1] - (a[0] * b[2] + a[1] * b[3]);
    CHECK(c[4] == doctest::Approx(a[4] + b[4] + 2 * dot));
}

TEST_CASE("abelian law is coordinatewise addition") {
    auto A = abelian(2);
    auto z = mul(A, {1.5, -2}, {0.25, 4});
    CHECK(z[0] == 1.75);
    CHECK(z[1] == 2.0);
}

TEST_CASE("engel law agrees with a hand expansion to depth 3") {
    auto E = engel();
    CHECK(E.hom_dim() == 2 + 2 + 3);
    CHECK(E.norm_exponent() == 12);
    std::mt19937_64 r(3);
    for (int i = 0; i < 100; ++i) {
        auto x = rnd(r, 4), y = rnd(r, 4);
        auto z = mul(E, x, y);
        double c12 = x[0] * y[1] - x[1] * y[0];
        double z3 = x[2] + y[2] + 0.5 * c12;
        double z4 = x[3] + y[3] + 0.5 * (x[0] * y[2] - x[2] * y[0]) + (x[0] - y[0]) * c12 / 12.0;
        CHECK(z[0] == doctest::Approx(x[0] + y[0]));
        CHECK(z[2] == doctest::Approx(z3).epsilon(1e-13));
        CHECK(z[3] == doctest::Approx(z4).epsilon(1e-13));
    }
}

TEST_CASE("group axioms on three groups") {
    std::mt19937_64 r(4);
    for (auto G : {heisenberg(1), heisenberg(2), engel()}) {
        const int n = G.dim();
        for (int i = 0; i < 1000; ++i) {
            auto x = rnd(r, n), y = rnd(r, n), z = rnd(r, n);
            CHECK(maxdiff(mul(G, mul(G, x, y), z), mul(G, x, mul(G, y, z))) < 1e-12);
            auto e = mul(G, x, inverse(G, x));
            for (double v : e) CHECK(std::abs(v) < 1e-12);
            CHECK(maxdiff(mul(G, Point(n, 0.0), x), x) == 0.0);
            for (double lam : {0.5, 2.0, 10.0})
                CHECK(maxdiff(dilate(G, lam, mul(G, x, y)), mul(G, dilate(G, lam, x), dilate(G, lam, y))) < 1e-12);
            auto xy = mul(G, x, y);
            for (int k = 0; k < G.n1(); ++k) CHECK(xy[k] == x[k] + y[k]);
        }
    }
}

TEST_CASE("dilation examples") {
    auto H = heisenberg(1);
    auto d = dilate(H, 3.0, {1, 2, 3});
    CHECK(d == Point{3, 6, 27});
    CHECK(dilate(H, 1.0, {1, 2, 3}) == Point{1, 2, 3});
    auto lhs = dilate(H, 2.0, mul(H, {1, 0, 0}, {0, 1, 0}));
    auto rhs = mul(H, dilate(H, 2.0, {1, 0, 0}), dilate(H, 2.0, {0, 1, 0}));
    CHECK(lhs == Point{2, 2, -8});
    CHECK(rhs == Point{2, 2, -8});
    CHECK_THROWS_AS(dilate(H, 0.0, {1, 2, 3}), Error);
}

TEST_CASE("homogeneous norm") {
    auto H = heisenberg(1);
    CHECK(hnorm(H, Point{0, 0, 4}) == doctest::Approx(2.0));
    CHECK(hnorm(H, Point{0, 0, 0}) == 0.0);
    CHECK(hnorm(H, Point{1, 1, 1}) == doctest::Approx(std::pow(3.0, 0.25)));
    std::mt19937_64 r(5);
    for (int i = 0; i < 100; ++i) {
        auto x = rnd(r, 3);
        CHECK(hnorm(H, dilate(H, 7.0, x)) == doctest::Approx(7.0 * hnorm(H, x)).epsilon(1e-13));
        CHECK(hnorm(H, inverse(H, x)) == hnorm(H, x));
        CHECK(hnorm_sigma(H, 0, x) == doctest::Approx(hnorm(H, x)).epsilon(1e-15));
    }
    auto xs = sigma_point(H, 3, {1, 1, 1});
    CHECK(xs[0] == 1.0);
    CHECK(xs[1] == 0.125);
    CHECK(xs[2] == 1.0 / 64);
    double want = std::pow(1.0 + std::pow(2.0, -12) + std::pow(2.0, -12), 0.25);
    CHECK(hnorm_sigma(H, 3, Point{1, 1, 1}) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("structure validation") {
    // [X1,X3] landing back in layer 1 breaks the grading
    CHECK_THROWS_WITH_AS(build_group(2, {2, 1}, {{1, 2, 3, 1.0}, {1, 3, 2, 1.0}}), doctest::Contains("GradingViolation"),
                         Error);
    // not stratified: the second layer is never reached
    CHECK_THROWS_WITH_AS(build_group(2, {2, 1}, {}), doctest::Contains("NotStratified"), Error);
    // graded step-3 pattern that is a Lie algebra
    try {
        build_group(3, {2, 1, 1}, {{1, 2, 3, 1.0}, {1, 3, 4, 1.0}, {2, 3, 4, 1.0}});
        // this one satisfies Jacobi trivially (all triple brackets land in layer 4 = 0)
    } catch (const Error&) {
        FAIL("unexpected error");
    }
    CHECK_THROWS_WITH_AS(
        build_group(3, {3, 1, 1}, {{1, 2, 4, 1.0}, {3, 4, 5, 1.0}}),
        // (X1,X2,X3) cycle sums to [X3,X4] = X5
        doctest::Contains("JacobiViolation"), Error);
    CHECK_THROWS_AS(build_group(2, {2, 1}, {{1, 2, 3, 1.0}, {2, 1, 3, 1.0}}), Error);
}

TEST_CASE("descriptor parsing") {
    auto G = parse_group("# heisenberg\ndims 2 1\nc (1, 2, 3, -4)\n");
    auto z = mul(G, {1, 0, 0}, {0, 1, 0});
    CHECK(z[2] == doctest::Approx(-2.0));
    CHECK_THROWS_AS(parse_group("dims 2 1\nbogus 1\n"), Error);
    CHECK_THROWS_AS(mul(G, {1, 0}, {0, 1, 0}), Error);
}
