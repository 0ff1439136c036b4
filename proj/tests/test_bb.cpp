#include <cmath>

#include "doctest.h"
#include "hgroup/bb.hpp"

using namespace hg;

namespace {

GridSpec h1_box(int n) { return GridSpec(std::vector<int>{n, n, n}, std::vector<double>{4.0, 4.0, 6.0}); }

GridFunction gauss_bump(const GridSpec& s, double w) {
    return GridFunction::sample(s, [w](const double* x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (w * w) - x[2] * x[2] / (w * w * w * w));
    });
}

// two scales, modulated along x_1
GridFunction two_scale(const GridSpec& s) {
    return GridFunction::sample(s, [](const double* x) {
        double e1 = std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4.0 - x[2] * x[2] / 16.0);
        double e2 = std::exp(-((x[0] - 1) * (x[0] - 1) + x[1] * x[1]) - x[2] * x[2]);
        return e1 * std::cos(M_PI * x[0]) + 0.5 * e2 * std::cos(4 * M_PI * x[0]);
    });
}

double l1_deriv(const std::vector<double>& v, double h) {
    double s = 0.0;
    for (size_t i = 1; i + 1 < v.size(); ++i) s += std::abs(v[i + 1] - v[i - 1]) / (2 * h);
    return s * h;
}

double bhat(double r) {
    r = std::abs(r);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    double u = r - 1.0;
    double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return 1.0 - a / (a + b);
}

}  // namespace

TEST_CASE("cutoff and parameter validation") {
    CHECK(zeta(0.0) == 1.0);
    CHECK(zeta(0.5) == 1.0);
    CHECK(zeta(1.0) == 0.0);
    CHECK(zeta(7.0) == 0.0);
    double prev = 1.0;
    for (double s = 0.5; s <= 1.0; s += 0.01) {
        CHECK(zeta(s) <= prev + 1e-15);
        prev = zeta(s);
    }
    BBParams p;
    p.sigma = 3;
    CHECK(p.R(4) == 36);
    p.B = 10.0;  // 2(Q+1) for Q = 4
    CHECK_THROWS_WITH_AS(p.validate(4), doctest::Contains("InvalidArgument"), Error);
}

TEST_CASE("zero input") {
    auto s = h1_box(17);
    KernelBank bank(heisenberg(1), s, BankParams{-2, 5});
    GridFunction z(s);
    auto r = compute_f0(bank, z, 2, -1, 1);
    CHECK(r.f0.is_zero());
    BBParams p;
    p.j_min = -1;
    p.j_max = 1;
    auto t = approximate(bank, z, p);
    CHECK(t.F_out.is_zero());
    CHECK(t.g.is_zero());
    CHECK(t.h.is_zero());
}

TEST_CASE("f0 gradient ratio decreases with N on the Heisenberg group") {
    auto s = h1_box(33);
    KernelBank bank(heisenberg(1), s, BankParams{-4, 6});
    auto f = gauss_bump(s, 0.8);
    double prev = INFINITY;
    for (int N = 1; N <= 4; ++N) {
        double r = compute_f0(bank, f, N, -3, 2).ratio;
        MESSAGE("N = " << N << " ratio " << r);
        CHECK(r <= prev);
        prev = r;
    }
    CHECK(prev < 0.7);
}

TEST_CASE("f0 gradient ratio on the line against a Fourier computation") {
    // f0 = f - sum_j S_{j+N} Delta_j f; on R the operator is the multiplier
    // 1 - sum_j (b(xi/2^{j+1}) - b(xi/2^j)) s(xi/2^{j+N})
    auto s = GridSpec(std::vector<int>{2049}, std::vector<double>{80.0});
    KernelBank bank(abelian(1), s, BankParams{-9, 10});
    auto f = GridFunction::sample(s, [](const double* x) { return std::exp(-x[0] * x[0] / 2); });

    // transform of exp(-sqrt(1+x^2)) is 2 K_1(sqrt(1+b^2)) / sqrt(1+b^2), b = 2 pi eta
    auto shat = [](double eta) {
        double q = std::sqrt(1 + 4 * M_PI * M_PI * eta * eta);
        return std::cyl_bessel_k(1.0, q) / (q * std::cyl_bessel_k(1.0, 1.0));
    };
    const int K = 3000;
    const double XI = 1.5, dxi = XI / K;
    std::vector<double> xs;
    for (int i = -800; i <= 800; ++i) xs.push_back(i * 0.05);
    std::vector<double> ratio(5);
    for (int N = 1; N <= 4; ++N) {
        std::vector<double> f0(xs.size(), 0.0), fx(xs.size(), 0.0);
        for (int k = 0; k < K; ++k) {
            double xi = (k + 0.5) * dxi, m = 1.0;
            for (int j = -40; j <= 20; ++j) {
                double d = bhat(xi / std::ldexp(1.0, j + 1)) - bhat(xi / std::ldexp(1.0, j));
                if (d != 0.0) m -= d * shat(xi / std::ldexp(1.0, j + N));
            }
            double fh = std::sqrt(2 * M_PI) * std::exp(-2 * M_PI * M_PI * xi * xi);
            for (size_t i = 0; i < xs.size(); ++i) {
                double c = 2 * std::cos(2 * M_PI * xi * xs[i]) * fh * dxi;
                f0[i] += m * c;
                fx[i] += c;
            }
        }
        ratio[N] = l1_deriv(f0, 0.05) / l1_deriv(fx, 0.05);
        double got = compute_f0(bank, f, N, -8, 5).ratio;
        MESSAGE("N = " << N << " grid " << got << " Fourier " << ratio[N]);
        CHECK(std::abs(got - ratio[N]) < 0.03);
    }
    // the halving from N = 1 to N = 4 is not reached with this convention
    MESSAGE("ratio(4) / ratio(1) = " << ratio[4] / ratio[1]);
    CHECK(ratio[4] / ratio[1] < 0.75);
}

TEST_CASE("structure of the approximation on the Heisenberg group") {
    auto s = h1_box(33);
    auto H = heisenberg(1);
    KernelBank bank(H, s, BankParams{-4, 4});
    auto f = two_scale(s);
    BBParams p;
    p.sigma = 3;
    p.j_min = -1;
    p.j_max = 1;
    auto t = approximate(bank, f, p);
    CHECK(t.R == 36);
    CHECK(t.grad_f == doctest::Approx(t.small_bound).epsilon(1e-9));
    auto r = derivative_report(bank, t);

    CHECK(r.split_defect <= 1e-10);
    CHECK(r.identity_defect <= 1e-12);
    CHECK(r.u_min >= 0.0);
    CHECK(r.u_max <= 1.0);
    CHECK(r.g_min >= 0.0);
    CHECK(r.g_max <= 1.0);
    CHECK(r.selection_ratio <= 3.0 * (1 + 1e-6));
    CHECK(r.dom_a_omega < INFINITY);
    CHECK(r.h_dom < INFINITY);
    for (size_t k = 0; k < r.js.size(); ++k) {
        const auto& q = r.anisotropy[k][0];
        MESSAGE("j = " << r.js[k] << " ordered " << q.frac_ordered << " gain " << q.median_k / q.median_1);
    }
    CHECK(r.pooled_ordered >= 0.99);
    CHECK(r.worst_gain <= 0.25);
    MESSAGE("good direction " << r.good_dir[0] << " " << r.good_dir[1]);

    // closed-form kernel derivative against central differences where the kernel is resolved
    for (int k = 1; k <= 2; ++k) CHECK(l2_rel(xk(H, k, bank.e_kernel(-1, 3, 4)), bank.e_kernel_xk(-1, 3, 4, k)) < 0.05);
}

TEST_CASE("scaling covariance and the smallness guard") {
    auto s = h1_box(17);
    KernelBank bank(heisenberg(1), s, BankParams{-3, 5});
    auto f = gauss_bump(s, 1.0);
    BBParams p;
    p.j_min = -1;
    p.j_max = 1;
    auto t1 = approximate(bank, f, p);
    auto t2 = approximate(bank, f * 3.0, p);
    CHECK(l2_rel(t1.F_out * 3.0, t2.F_out) < 1e-12);
    CHECK(t1.c_G == doctest::Approx(t2.c_G).epsilon(1e-12));

    // the guard needs a fixed c_G; calibration would move the bound with the input
    p.rescale = false;
    p.c_G = t1.c_G;
    CHECK_THROWS_WITH_AS(approximate(bank, f * (2.0 * t1.scale), p), doctest::Contains("SmallnessViolation"), Error);
    auto ok = approximate(bank, f * (0.5 * t1.scale), p);
    CHECK(ok.scale == 1.0);
}

TEST_CASE("lattice sum against the convolution surrogate") {
    auto s = h1_box(17);
    KernelBank bank(heisenberg(1), s, BankParams{-3, 4});
    auto f = gauss_bump(s, 1.0);
    BBParams p;
    p.N = 1;
    p.j_min = -1;
    p.j_max = -1;
    auto t = approximate(bank, f, p);
    const auto& st = t.scales[0];
    for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.5, -0.25, 0.5}}) {
        auto e = omega_lattice_at(bank, st.a, st.j, p, x);
        double sur = st.omega.at(x.data());
        MESSAGE("lattice " << e.value << " surrogate " << sur << " points " << e.points);
        CHECK(e.value > 0.0);
        CHECK(e.value / sur == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("small R exercises the g branch") {
    auto s = h1_box(17);
    KernelBank bank(heisenberg(1), s, BankParams{-4, 4});
    auto f = two_scale(s);
    BBParams p;
    p.j_min = -2;
    p.j_max = 2;
    p.R_override = 2;
    auto t = approximate(bank, f, p);
    CHECK(t.R == 2);
    CHECK(t.classes.size() == 2);
    CHECK(t.g.max_abs() > 0.0);
    auto r = derivative_report(bank, t);
    CHECK(r.split_defect <= 1e-10);
    CHECK(r.g_min >= 0.0);
    CHECK(r.g_max <= 1.0);
    CHECK(r.selection_ratio <= 3.0 * (1 + 1e-6));
    MESSAGE("g~ sup " << r.g_tilde_sup << " g dom " << r.g_dom);
}
