#include <algorithm>
#include <cmath>

#include "hgroup/calculus.hpp"

namespace hg {

GridFunction partial(const GridFunction& f, int axis) {
    const GridSpec& s = f.spec();
    const int Na = s.N[axis];
    const double ih = 1.0 / (2.0 * s.h(axis));
    auto st = s.strides();
    const size_t str = st[axis];
    GridFunction out(s);
    const double* u = f.data();
    double* o = out.data();
    for (size_t i = 0; i < f.size(); ++i) {
        int ia = (int)((i / str) % Na);
        if (ia == 0)
            o[i] = (-3.0 * u[i] + 4.0 * u[i + str] - u[i + 2 * str]) * ih;
        else if (ia == Na - 1)
            o[i] = (3.0 * u[i] - 4.0 * u[i - str] + u[i - 2 * str]) * ih;
        else
            o[i] = (u[i + str] - u[i - str]) * ih;
    }
    return out;
}

// transpose of `partial` as a matrix
static GridFunction partial_t(const GridFunction& f, int axis) {
    const GridSpec& s = f.spec();
    const int Na = s.N[axis];
    const double ih = 1.0 / (2.0 * s.h(axis));
    auto st = s.strides();
    const size_t str = st[axis];
    GridFunction out(s);
    const double* g = f.data();
    double* o = out.data();
    for (size_t i = 0; i < f.size(); ++i) {
        int ia = (int)((i / str) % Na);
        double v = g[i] * ih;
        if (ia == 0) {
            o[i] -= 3.0 * v;
            o[i + str] += 4.0 * v;
            o[i + 2 * str] -= v;
        } else if (ia == Na - 1) {
            o[i] += 3.0 * v;
            o[i - str] -= 4.0 * v;
            o[i - 2 * str] += v;
        } else {
            o[i + str] += v;
            o[i - str] -= v;
        }
    }
    return out;
}

static void check_k(const GradedGroup& G, int k, const GridFunction& f) {
    if (k < 1 || k > G.dim()) throw Error(ErrorCode::InvalidArgument, "field index out of range");
    if (f.spec().dim() != G.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and group dimensions differ");
}

static GridFunction apply_field(const GradedGroup& G, int k, const GridFunction& f, bool right) {
    check_k(G, k, f);
    const int n = G.dim();
    GridFunction out(f.spec());
    std::vector<double> x(n);
    for (int kp = 0; kp < n; ++kp) {
        const Poly& c = right ? G.right_coef(k - 1, kp) : G.left_coef(k - 1, kp);
        if (c.is_zero()) continue;
        GridFunction d = partial(f, kp);
        bool constant = c.terms.size() == 1 && std::all_of(c.terms[0].e.begin(), c.terms[0].e.end(),
                                                              [](int e) { return e == 0; });
        if (constant) {
            const double cv = c.terms[0].c;
            for (size_t i = 0; i < out.size(); ++i) out[i] += cv * d[i];
        } else {
            for (size_t i = 0; i < out.size(); ++i) {
                f.spec().node(i, x.data());
                out[i] += c.eval(x.data()) * d[i];
            }
        }
    }
    return out;
}

GridFunction xk(const GradedGroup& G, int k, const GridFunction& f) { return apply_field(G, k, f, false); }

GridFunction xk_right(const GradedGroup& G, int k, const GridFunction& f) { return apply_field(G, k, f, true); }

GridFunction xk_transpose(const GradedGroup& G, int k, const GridFunction& f) {
    check_k(G, k, f);
    const int n = G.dim();
    GridFunction out(f.spec());
    std::vector<double> x(n);
    for (int kp = 0; kp < n; ++kp) {
        const Poly& c = G.left_coef(k - 1, kp);
        if (c.is_zero()) continue;
        GridFunction w(f);
        for (size_t i = 0; i < w.size(); ++i) {
            f.spec().node(i, x.data());
            w[i] *= c.eval(x.data());
        }
        out += partial_t(w, kp);
    }
    return out;
}

std::vector<GridFunction> nabla_b(const GradedGroup& G, const GridFunction& f) {
    std::vector<GridFunction> r;
    for (int k = 1; k <= G.n1(); ++k) r.push_back(xk(G, k, f));
    return r;
}

double ball_volume(const GradedGroup& G, const GridSpec& s, double r) {
    std::vector<double> x(s.dim());
    size_t cnt = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        s.node(i, x.data());
        if (hnorm(G, x.data()) <= r) ++cnt;
    }
    return cnt * s.cell();
}

std::vector<double> default_ladder(const GradedGroup& G, const GridSpec& s, int rungs) {
    if (rungs < 1) throw Error(ErrorCode::InvalidArgument, "empty radius ladder");
    double hmax = 0.0, lmin = 1e300;
    for (int a = 0; a < s.dim(); ++a) {
        hmax = std::max(hmax, std::pow(s.h(a), 1.0 / G.layer(a)));
        lmin = std::min(lmin, std::pow(s.L[a], 1.0 / G.layer(a)));
    }
    double r0 = 2.0 * hmax, r1 = lmin;
    std::vector<double> r(rungs);
    for (int i = 0; i < rungs; ++i) r[i] = rungs == 1 ? r0 : r0 * std::pow(r1 / r0, (double)i / (rungs - 1));
    return r;
}

GridFunction maximal(const GradedGroup& G, const GridFunction& f, const std::vector<double>& radii) {
    if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "empty radius ladder");
    GridFunction af = f.abs();
    GridFunction out(f.spec());
    std::vector<double> x(G.dim());
    for (double r : radii) {
        GridFunction chi = GridFunction::sample(f.spec(), [&](const double* y) { return hnorm(G, y) <= r ? 1.0 : 0.0; });
        GridFunction avg = convolve(G, af, chi) * std::pow(r, -G.hom_dim());
        for (size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], avg[i]);
    }
    return out;
}

std::vector<DerivIdentityReport> conv_deriv_identities(const GradedGroup& G, const GridFunction& f,
                                                       const GridFunction& g, std::vector<int> ks) {
    if (ks.empty())
        for (int k = 1; k <= G.n1(); ++k) ks.push_back(k);
    GridFunction fg = convolve(G, f, g);
    std::vector<DerivIdentityReport> out;
    auto rel = [](const GridFunction& a, const GridFunction& b) {
        double nb = std::max(lp_norm(a, 2.0), lp_norm(b, 2.0));
        return nb > 0.0 ? lp_norm(a - b, 2.0) / nb : 0.0;
    };
    for (int k : ks) {
        DerivIdentityReport r;
        r.k = k;
        GridFunction Xf = xk(G, k, f), Xg = xk(G, k, g), XRg = xk_right(G, k, g), XRf = xk_right(G, k, f);
        GridFunction a = xk(G, k, fg), b = convolve(G, f, Xg);
        r.left = rel(a, b);
        GridFunction c = convolve(G, Xf, g), d = convolve(G, f, XRg);
        r.mixed = rel(c, d);
        r.right = rel(xk_right(G, k, fg), convolve(G, XRf, g));
        r.witness = rel(c, b);
        out.push_back(r);
    }
    return out;
}

namespace {

// solve the small dense system A x = b (A square), partial pivoting
std::vector<double> solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = (int)b.size();
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
        std::swap(A[c], A[p]);
        std::swap(b[c], b[p]);
        if (std::abs(A[c][c]) < 1e-14) throw Error(ErrorCode::NotStratified, "bracket table is singular");
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = A[r][c] / A[c][c];
            for (int q = 0; q < n; ++q) A[r][q] -= f * A[c][q];
            b[r] -= f * b[c];
        }
    }
    for (int c = 0; c < n; ++c) b[c] /= A[c][c];
    return b;
}

CoordTable coord_table(const GradedGroup& G, bool right) {
    if (G.step() > 2) throw Error(ErrorCode::UnsupportedStep, "coordinate table needs step <= 2");
    const int n = G.dim(), n1 = G.n1();
    auto coef = [&](int k, int kp) -> const Poly& { return right ? G.right_coef(k, kp) : G.left_coef(k, kp); };
    CoordTable t;
    t.right = right;
    t.rows.resize(n);
    Poly one{n, {{1.0, std::vector<int>(n, 0)}}};
    if (G.step() == 1) {
        for (int i = 0; i < n; ++i) t.rows[i].push_back({one, {i + 1}});
        return t;
    }
    // [Y_a, Y_b] = sum_k' dab^k' d/dx_k' with constant coefficients
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n1; ++a)
        for (int b = a + 1; b < n1; ++b) pairs.push_back({a, b});
    const int n2 = n - n1;
    std::vector<std::vector<double>> D(n2, std::vector<double>(pairs.size(), 0.0));
    std::vector<double> zero(n, 0.0);
    for (size_t p = 0; p < pairs.size(); ++p) {
        auto [a, b] = pairs[p];
        for (int kp = n1; kp < n; ++kp)
            D[kp - n1][p] = coef(b, kp).derivative(a).eval(zero.data()) - coef(a, kp).derivative(b).eval(zero.data());
    }
    // minimum-norm right inverse of D
    std::vector<std::vector<double>> DDt(n2, std::vector<double>(n2, 0.0));
    for (int r = 0; r < n2; ++r)
        for (int c = 0; c < n2; ++c)
            for (size_t p = 0; p < pairs.size(); ++p) DDt[r][c] += D[r][p] * D[c][p];
    std::vector<std::vector<double>> w(n2);
    for (int kp = 0; kp < n2; ++kp) {
        std::vector<double> e(n2, 0.0);
        e[kp] = 1.0;
        auto z = solve(DDt, e);
        w[kp].assign(pairs.size(), 0.0);
        for (size_t p = 0; p < pairs.size(); ++p)
            for (int r = 0; r < n2; ++r) w[kp][p] += D[r][p] * z[r];
    }
    auto top_terms = [&](int kp, const Poly& c, double sgn, std::vector<CoordTerm>& row) {
        for (size_t p = 0; p < pairs.size(); ++p) {
            double wv = w[kp][p];
            if (std::abs(wv) < 1e-15) continue;
            Poly cc = c;
            for (auto& m : cc.terms) m.c *= sgn * wv;
            Poly cm = cc;
            for (auto& m : cm.terms) m.c = -m.c;
            row.push_back({cc, {pairs[p].first + 1, pairs[p].second + 1}});
            row.push_back({cm, {pairs[p].second + 1, pairs[p].first + 1}});
        }
    };
    for (int kp = n1; kp < n; ++kp) top_terms(kp - n1, one, 1.0, t.rows[kp]);
    for (int i = 0; i < n1; ++i) {
        t.rows[i].push_back({one, {i + 1}});
        for (int kp = n1; kp < n; ++kp) {
            const Poly& c = coef(i, kp);
            if (c.is_zero()) continue;
            top_terms(kp - n1, c, -1.0, t.rows[i]);
        }
    }
    return t;
}

}  // namespace

CoordTable coord_from_right_invariant(const GradedGroup& G) { return coord_table(G, true); }
CoordTable coord_from_left_invariant(const GradedGroup& G) { return coord_table(G, false); }

GridFunction apply_coord(const GradedGroup& G, const CoordTable& t, int i, const GridFunction& f) {
    if (i < 1 || i > (int)t.rows.size()) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
    GridFunction out(f.spec());
    std::vector<double> x(G.dim());
    for (const auto& term : t.rows[i - 1]) {
        GridFunction u = f;
        for (auto it = term.word.rbegin(); it != term.word.rend(); ++it)
            u = t.right ? xk_right(G, *it, u) : xk(G, *it, u);
        for (size_t p = 0; p < u.size(); ++p) {
            f.spec().node(p, x.data());
            out[p] += term.coef.eval(x.data()) * u[p];
        }
    }
    return out;
}

}  // namespace hg
