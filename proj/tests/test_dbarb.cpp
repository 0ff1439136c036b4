#include <cmath>
#include <random>

#include "doctest.h"
#include "hgroup/calculus.hpp"
#include "hgroup/dbarb.hpp"

using namespace hg;

namespace {

GridSpec h2_box(int n, double L = 3.0, double T = 4.0) {
    return GridSpec(std::vector<int>{n, n, n, n, n}, std::vector<double>{L, L, L, L, T});
}

// coordinates x1 x2 y1 y2 t
double env(const double* p, double cx = 0.0) {
    double r2 = (p[0] - cx) * (p[0] - cx) + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
    return std::exp(-r2 - p[4] * p[4] / 2.0);
}

CField cfield(const GridSpec& s, double a, double b, double cx = 0.0) {
    return CField(GridFunction::sample(s, [=](const double* p) { return env(p, cx) * (1.0 + a * p[0] - b * p[3]); }),
                  GridFunction::sample(s, [=](const double* p) { return env(p, cx) * (b * p[1] + a * p[2] * p[4]); }));
}

FormField sample_form(int q, const GridSpec& s, double seed) {
    FormField u(2, q, s);
    int i = 0;
    for (auto& [a, c] : u.coef) {
        c = cfield(s, 0.3 + seed + 0.2 * i, 0.5 - 0.1 * i, 0.2 * i);
        ++i;
    }
    return u;
}

FormField random_form(int q, const GridSpec& s, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    FormField u(2, q, s);
    for (auto& [a, c] : u.coef) {
        for (GridFunction* g : {&c.re, &c.im})
            *g = GridFunction::sample(s, [&](const double* p) { return nd(rng) * env(p) * env(p); });
    }
    return u;
}

double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

}  // namespace

TEST_CASE("multi-indices and sign bookkeeping") {
    auto m = multi_indices(3, 2);
    REQUIRE(m.size() == 3);
    CHECK(m[0] == MultiIndex{1, 2});
    CHECK(m[1] == MultiIndex{1, 3});
    CHECK(m[2] == MultiIndex{2, 3});
    CHECK(multi_indices(4, 0).size() == 1);
    CHECK(multi_indices(4, 4).size() == 1);

    MultiIndex out;
    CHECK(wedge_sign(2, {1, 3}, &out) == -1);
    CHECK(out == MultiIndex{1, 2, 3});
    CHECK(wedge_sign(1, {2, 3}, &out) == 1);
    CHECK(wedge_sign(3, {1, 3}, nullptr) == 0);
    CHECK(interior_sign(3, {1, 3}, &out) == -1);
    CHECK(out == MultiIndex{1});
    CHECK(interior_sign(2, {1, 3}, nullptr) == 0);

    // <dz_k ^ w, tau> = <w, dz_k _| tau> on basis elements
    const int n = 4;
    for (int q = 0; q < n; ++q)
        for (const auto& w : multi_indices(n, q))
            for (const auto& tau : multi_indices(n, q + 1))
                for (int k = 1; k <= n; ++k) {
                    MultiIndex a, b;
                    int s1 = wedge_sign(k, w, &a);
                    int lhs = (s1 != 0 && a == tau) ? s1 : 0;
                    int s2 = interior_sign(k, tau, &b);
                    int rhs = (s2 != 0 && b == w) ? s2 : 0;
                    CHECK(lhs == rhs);
                }
}

TEST_CASE("dbar_b of a function on H^2 against closed-form derivatives") {
    auto G = heisenberg(2);
    std::vector<double> err;
    for (int N : {9, 17}) {
        auto s = h2_box(N);
        FormField u(2, 0, s);
        // u = exp(-|z|^2 - t^2/2), real
        u[{}].re = GridFunction::sample(s, [](const double* p) { return env(p); });
        auto du = dbar_b(G, u);
        CHECK(du.q == 1);
        double e = 0.0;
        // X_k u = (d_{x_k} + 2 y_k d_t) u, X_{k+2} u = (d_{y_k} - 2 x_k d_t) u
        for (int k = 1; k <= 2; ++k) {
            auto ex = GridFunction::sample(s, [k](const double* p) {
                double x = p[k - 1], y = p[k + 1], t = p[4];
                return 0.5 * env(p) * (-2 * x - 2 * y * t);
            });
            auto ey = GridFunction::sample(s, [k](const double* p) {
                double x = p[k - 1], y = p[k + 1], t = p[4];
                return 0.5 * env(p) * (-2 * y + 2 * x * t);
            });
            const CField& c = du[{k}];
            e = std::max({e, l2_rel(ex, c.re), l2_rel(ey, c.im)});
            // the stencil form is exactly Zbar_k u
            auto z = zbar_field(G, k, u[{}]);
            CHECK(l2_rel(z.re, c.re) == 0.0);
            CHECK(l2_rel(z.im, c.im) == 0.0);
        }
        MESSAGE("N = " << N << " error " << e);
        err.push_back(e);
    }
    CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("dbar_b composed with itself vanishes") {
    auto G = heisenberg(2);
    double prev = 0.0;
    for (int N : {9, 17}) {
        auto s = h2_box(N);
        FormField u(2, 0, s);
        u[{}] = cfield(s, 0.7, 0.4);
        auto dd = dbar_b(G, dbar_b(G, u));
        REQUIRE(dd.q == 2);
        const double r = dd.norm(2.0) / u.norm(2.0);
        // the commutator of the two Zbar stencils, directly
        auto c = zbar_field(G, 1, zbar_field(G, 2, u[{}]));
        c -= zbar_field(G, 2, zbar_field(G, 1, u[{}]));
        const double r2 = std::sqrt(lp_norm(c.re, 2) * lp_norm(c.re, 2) + lp_norm(c.im, 2) * lp_norm(c.im, 2)) / u.norm(2.0);
        MESSAGE("N = " << N << " |dbar dbar u|/|u| = " << r << ", commutator " << r2);
        CHECK(r <= 1e-12);
        CHECK(r2 <= 1e-12);
        if (prev > 1e-12) CHECK(std::log2(prev / r) >= 1.8);
        prev = r;
    }
}

TEST_CASE("dbar_b star of a single coefficient") {
    auto G = heisenberg(2);
    auto s = h2_box(9);
    FormField u(2, 1, s);
    u[{1}] = cfield(s, 0.5, 0.2);
    auto v = dbar_b_star(G, u);
    CHECK(v.q == 0);
    auto z = z_field(G, 1, u[{1}]);
    CHECK(l2_rel(z.re * -1.0, v[{}].re) == 0.0);
    CHECK(l2_rel(z.im * -1.0, v[{}].im) == 0.0);

    // degree guards
    CHECK_THROWS_WITH_AS(dbar_b_star(G, FormField(2, 0, s)), doctest::Contains("DegreeError"), Error);
    CHECK_THROWS_WITH_AS(dbar_b(G, FormField(2, 2, s)), doctest::Contains("DegreeError"), Error);
    CHECK_THROWS_WITH_AS(FormField(2, 3, s), doctest::Contains("DegreeError"), Error);
    CHECK_THROWS_WITH_AS(dbar_b(engel(), FormField(2, 0, s)), doctest::Contains("InvalidArgument"), Error);
}

TEST_CASE("pairing and adjointness") {
    auto G = heisenberg(2);
    std::vector<double> res;
    for (int N : {9, 17}) {
        auto s = h2_box(N);
        auto u0 = sample_form(0, s, 0.0), v1 = sample_form(1, s, 0.4);
        auto u1 = sample_form(1, s, 0.1), v2 = sample_form(2, s, 0.3);
        auto a = pairing(dbar_b(G, u0), v1), b = pairing(u0, dbar_b_star(G, v1));
        auto c = pairing(dbar_b(G, u1), v2), d = pairing(u1, dbar_b_star(G, v2));
        const double r01 = std::abs(a - b) / (u0.norm(2) * v1.norm(2));
        const double r12 = std::abs(c - d) / (u1.norm(2) * v2.norm(2));
        MESSAGE("N = " << N << " adjointness residuals " << r01 << " " << r12);
        res.push_back(std::max(r01, r12));
        if (N == 9) {
            CHECK(rel(pairing(u1, v1), std::conj(pairing(v1, u1))) < 1e-14);
            CHECK(pairing(u1, u1).real() > 0.0);
            CHECK(std::abs(pairing(u1, u1).imag()) < 1e-14 * pairing(u1, u1).real());
            CHECK(pairing(FormField(2, 1, s), FormField(2, 1, s)) == std::complex<double>(0.0, 0.0));
            FormField e1(2, 1, s), e2(2, 1, s);
            e1[{1}] = u1[{1}];
            e2[{2}] = u1[{2}];
            CHECK(pairing(e1, e2) == std::complex<double>(0.0, 0.0));
        }
    }
    // interior stencils are exactly skew; what is left comes from the one-sided faces
    CHECK(res[1] < 1e-5);
    CHECK(std::log2(res[0] / res[1]) >= 1.8);
}

TEST_CASE("transpose of dbar_b star is exact") {
    auto G = heisenberg(2);
    auto s = h2_box(9);
    auto x = sample_form(1, s, 0.2), w = random_form(0, s, 7);
    auto lhs = pairing(dbar_b_star(G, x), w).real();
    auto rhs = pairing(x, dbar_b_star_transpose(G, w)).real();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * x.norm(2) * w.norm(2) * 100);
}

TEST_CASE("solver with the synthetic corrector") {
    auto G = heisenberg(2);
    auto s = h2_box(9);
    auto beta = sample_form(1, s, 0.0);
    auto f = dbar_b_star(G, beta);
    SolveParams p;
    p.max_iter = 10;
    auto st = iterative_solve(G, f, synthetic_corrector(beta), p);
    REQUIRE(st.steps.size() == 10);
    for (int k = 0; k < 10; ++k)
        CHECK(std::abs(st.steps[k].residual / st.f_norm - std::ldexp(1.0, -(k + 1))) <= 1e-12);
    CHECK(st.Y.q == 2 - 1 + 0);
    CHECK(st.y_sup + st.y_grad <= 2 * st.A_max * st.f_norm + 1e-9);
    CHECK(st.converged);

    // failure modes
    CHECK_THROWS_WITH_AS(iterative_solve(G, beta, synthetic_corrector(FormField(2, 2, s)), p),
                         doctest::Contains("UnsupportedDegree"), Error);
    auto lazy = [&](const FormField& r, int) { return FormField(2, r.q + 1, r.spec); };
    CHECK_THROWS_WITH_AS(iterative_solve(G, f, lazy, p), doctest::Contains("ContractViolation"), Error);
    SolveParams tight;
    tight.max_iter = 3;
    tight.target = 1e-6;
    CHECK_THROWS_WITH_AS(iterative_solve(G, f, synthetic_corrector(beta), tight), doctest::Contains("MaxIterExceeded"),
                         Error);
    auto z = iterative_solve(G, FormField(2, 0, s), lazy, p);
    CHECK(z.converged);
    CHECK(z.Y.is_zero());
}

TEST_CASE("least-squares corrector on a manufactured image") {
    auto G = heisenberg(2);
    auto s = h2_box(9);
    auto f = dbar_b_star(G, sample_form(1, s, 0.0));
    SolveParams p;
    p.max_iter = 8;
    p.abort_on_violation = false;
    LSParams ls;
    auto st = iterative_solve(G, f, least_squares_corrector(G, ls), p);
    int halvings = 0;
    for (const auto& step : st.steps) {
        MESSAGE("residual " << step.residual / st.f_norm << " ratio " << step.ratio << " A " << step.A);
        if (step.ratio <= 0.5) ++halvings;
        else break;
    }
    CHECK(halvings >= 4);
}

TEST_CASE("pair swap is the automorphism moving X_i to X_1") {
    auto G = heisenberg(2);
    auto s = h2_box(9);
    auto f = GridFunction::sample(s, [](const double* p) { return env(p, 0.3) * (1 + p[1] - 0.5 * p[3] * p[4]); });
    auto g = swap_pair(f, 2, 2);
    CHECK(l2_rel(swap_pair(g, 2, 2), f) == 0.0);
    CHECK(l2_rel(xk(G, 1, g), swap_pair(xk(G, 2, f), 2, 2)) < 1e-14);
    CHECK(l2_rel(xk(G, 3, g), swap_pair(xk(G, 4, f), 2, 2)) < 1e-14);
}

TEST_CASE("duality pairing") {
    auto G = heisenberg(2);
    auto s = h2_box(11);
    auto u = sample_form(1, s, 0.1);
    auto alpha = sample_form(2, s, 0.2);
    auto beta = sample_form(0, s, 0.3);

    // phi = dbar_b beta only
    auto phi = dbar_b(G, beta);
    auto r = duality_check(G, u, phi, nullptr, &beta);
    CHECK(r.identity_residual < 1e-4);
    CHECK(r.holder_ok);

    auto phi2 = dbar_b_star(G, alpha) + dbar_b(G, beta);
    auto r2 = duality_check(G, u, phi2, &alpha, &beta);
    CHECK(r2.identity_residual < 1e-4);
    CHECK(r2.holder_ok);
    CHECK(r2.alpha_grad > 0.0);

    auto z = duality_check(G, FormField(2, 1, s), phi2, &alpha, &beta);
    CHECK(z.lhs == std::complex<double>(0.0, 0.0));
    CHECK(z.identity_residual == 0.0);

    for (unsigned seed = 1; seed <= 3; ++seed) {
        auto ur = random_form(1, s, seed);
        auto rr = duality_check(G, ur, phi2, &alpha, &beta);
        CHECK(rr.holder_ok);
        CHECK(std::abs(rr.lhs) <= rr.holder_bound);
    }
    CHECK_THROWS_WITH_AS(duality_check(G, u, phi2 * 1.01, &alpha, &beta), doctest::Contains("DecompositionResidual"),
                         Error);
}
