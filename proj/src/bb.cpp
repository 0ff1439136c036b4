#include "hgroup/bb.hpp"

#include <algorithm>
#include <cmath>

namespace hg {

int BBParams::R(int Q) const {
    if (R_override > 0) return R_override;
    double b = B > 0.0 ? B : 2.0 * (Q + 2);
    return std::max(1, (int)std::ceil(b * sigma));
}

void BBParams::validate(int Q) const {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "BBParams: N must be >= 1");
    if (sigma < 0) throw Error(ErrorCode::InvalidArgument, "BBParams: sigma must be >= 0");
    if (j_min > j_max) throw Error(ErrorCode::InvalidArgument, "BBParams: empty j-range");
    if (R_override == 0 && B > 0.0 && B <= 2.0 * (Q + 1))
        throw Error(ErrorCode::InvalidArgument, "BBParams: B must exceed 2(Q+1)");
    if (delta <= 0.0) throw Error(ErrorCode::InvalidArgument, "BBParams: delta must be positive");
}

double zeta(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    return smoothstep(2.0 * (1.0 - s));
}

namespace {

inline int mod(int j, int R) { return ((j % R) + R) % R; }

double grad_norm(const GradedGroup& G, const GridFunction& f) {
    return lp_norm(nabla_b(G, f), (double)G.hom_dim());
}

}  // namespace

F0Report compute_f0(const KernelBank& bank, const GridFunction& f, int N, int j_min, int j_max) {
    const GradedGroup& G = bank.group();
    F0Report r;
    auto d = lp_decompose(bank, f, j_min, j_max);
    r.f0 = f;
    for (const auto& [j, piece] : d.pieces) r.f0 -= convolve(G, piece, bank.heat(j + N));
    r.grad_f = grad_norm(G, f);
    r.grad_f0 = grad_norm(G, r.f0);
    r.ratio = r.grad_f > 0.0 ? r.grad_f0 / r.grad_f : 0.0;
    return r;
}

GridFunction omega(const KernelBank& bank, const GridFunction& a, int j, const BBParams& p) {
    const GradedGroup& G = bank.group();
    const int Q = G.hom_dim();
    GridFunction aq = a.map([Q](double v) { return std::pow(std::abs(v), Q); });
    GridFunction c = convolve(G, aq, bank.e_kernel(j, p.sigma, Q));
    const double lat = std::ldexp(1.0, p.N * Q);
    return c.map([&](double v) { return v > 0.0 ? std::pow(lat * v, 1.0 / Q) : 0.0; });
}

GridFunction omega_xk(const KernelBank& bank, const GridFunction& a, const GridFunction& w, int j,
                      const BBParams& p, int k) {
    const GradedGroup& G = bank.group();
    const int Q = G.hom_dim();
    GridFunction aq = a.map([Q](double v) { return std::pow(std::abs(v), Q); });
    GridFunction d = convolve(G, aq, bank.e_kernel_xk(j, p.sigma, Q, k));
    const double lat = std::ldexp(1.0, p.N * Q);
    for (size_t i = 0; i < d.size(); ++i) d[i] = w[i] > 0.0 ? lat * d[i] / (Q * std::pow(w[i], Q - 1)) : 0.0;
    return d;
}

GridFunction omega_tilde(const KernelBank& bank, const GridFunction& a, int j, const BBParams& p) {
    const GradedGroup& G = bank.group();
    GridFunction c = convolve(G, a, bank.e_kernel(j, p.sigma));
    c *= std::ldexp(1.0, p.N * G.hom_dim());
    return c;
}

LatticeEval omega_lattice_at(const KernelBank& bank, const GridFunction& a, int j, const BBParams& p,
                             const Point& x, long max_points) {
    const GradedGroup& G = bank.group();
    const GridSpec& s = a.spec();
    const int n = G.dim(), Q = G.hom_dim();
    const double M = G.norm_exponent();
    // r = 2^{-N} . s_int; the sample point 2^{-j} . r has coordinate 2^{-(j+N) l_a} s_a
    std::vector<long> lim(n);
    std::vector<double> step(n);
    long total = 1;
    for (int k = 0; k < n; ++k) {
        step[k] = std::ldexp(1.0, -(j + p.N) * G.layer(k));
        lim[k] = (long)std::floor(s.L[k] / step[k]);
        total *= 2 * lim[k] + 1;
        if (total > max_points) throw Error(ErrorCode::ResolutionError, "lattice sum too large at j=" + std::to_string(j));
    }
    const Point xs = dilate(G, std::ldexp(1.0, j), x);
    LatticeEval out;
    std::vector<long> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = -lim[k];
    Point r(n), y(n);
    double acc = 0.0;
    for (long c = 0; c < total; ++c) {
        for (int k = 0; k < n; ++k) {
            y[k] = step[k] * idx[k];                                  // 2^{-j} . r
            r[k] = std::ldexp((double)idx[k], -p.N * G.layer(k));     // r
        }
        double av = a.at(y.data());
        if (av != 0.0) {
            Point w = mul(G, inverse(G, r), xs);
            double e = std::exp(-std::pow(1.0 + std::pow(hnorm_sigma(G, p.sigma, w), M), 1.0 / M));
            if (e >= p.eps_tail)
                acc += std::pow(std::abs(av) * e, Q);
            else
                out.dropped = std::max(out.dropped, e);
        }
        ++out.points;
        for (int k = n - 1; k >= 0; --k) {
            if (++idx[k] <= lim[k]) break;
            idx[k] = -lim[k];
        }
    }
    out.value = std::pow(acc, 1.0 / Q);
    return out;
}

double product_identity_defect(const std::vector<const GridFunction*>& a) {
    if (a.empty()) return 0.0;
    double worst = 0.0;
    for (size_t i = 0; i < a[0]->size(); ++i) {
        double sum = 0.0, P = 1.0;
        for (const auto* g : a) {
            double v = (*g)[i];
            sum += v * P;
            P *= 1.0 - v;
        }
        worst = std::max(worst, std::abs(1.0 - (sum + P)));
    }
    return worst;
}

std::pair<double, double> ladder_range(const std::vector<const GridFunction*>& a) {
    if (a.empty()) return {0.0, 0.0};
    double lo = 1e300, hi = -1e300;
    for (size_t i = 0; i < a[0]->size(); ++i) {
        double sum = 0.0, P = 1.0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) {
            double v = (**it)[i];
            sum += v * P;
            P *= 1.0 - v;
        }
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
    }
    return {lo, hi};
}

BBTrace approximate(const KernelBank& bank, const GridFunction& f, const BBParams& p) {
    const GradedGroup& G = bank.group();
    const int Q = G.hom_dim();
    p.validate(Q);
    const GridSpec& s = f.spec();
    BBTrace t;
    t.params = p;
    t.R = p.R(Q);

    // everything up to zeta is positively 1-homogeneous in f; build on f and rescale afterwards
    auto d = lp_decompose(bank, f, p.j_min, p.j_max);
    for (int j = p.j_min; j <= p.j_max; ++j) {
        ScaleTrace st;
        st.j = j;
        st.piece = d.pieces.at(j);
        const GridFunction& S = bank.heat(j + p.N);
        st.smooth = convolve(G, st.piece, S);
        st.a = convolve(G, st.piece.abs(), S);
        st.omega = omega(bank, st.a, j, p);
        st.omega_tilde = omega_tilde(bank, st.a, j, p);
        t.scales.push_back(std::move(st));
    }
    const int J = (int)t.scales.size();
    auto idx = [&](int j) { return j - p.j_min; };

    // G_j before scaling, needed for calibration
    auto make_G = [&](int j) {
        GridFunction g(s);
        for (int tt = t.R; j - tt >= p.j_min; tt += t.R) g += t.scales[idx(j - tt)].omega_tilde * std::ldexp(1.0, -tt);
        return g;
    };
    std::vector<GridFunction> Graw;
    for (int j = p.j_min; j <= p.j_max; ++j) Graw.push_back(make_G(j));

    const double gf = grad_norm(G, f);
    const double unit = std::ldexp(1.0, -p.N * Q) * std::pow(2.0, -(double)p.sigma * (Q - 1));
    t.c_G = p.c_G;
    if (t.c_G <= 0.0) {
        double m = 0.0;
        for (int k = 0; k < J; ++k) m = std::max({m, t.scales[k].omega.max_abs(), Graw[k].max_abs()});
        const double s1 = gf > 0.0 ? unit / gf : 1.0;
        t.c_G = m > 0.0 ? (1.0 - 1e-12) / (m * s1) : 1.0;
    }
    t.small_bound = t.c_G * unit;
    if (gf == 0.0) {
        t.scale = 1.0;
    } else if (p.rescale) {
        t.scale = t.small_bound / gf;
    } else {
        t.scale = 1.0;
        if (gf > t.small_bound * (1.0 + 1e-9))
            throw Error(ErrorCode::SmallnessViolation,
                        "||grad_b f||_Q = " + std::to_string(gf) + " exceeds " + std::to_string(t.small_bound));
    }
    t.grad_f = gf * t.scale;

    t.f = f * t.scale;
    t.f0 = t.f;
    t.g = GridFunction(s);
    t.h = GridFunction(s);
    for (int k = 0; k < J; ++k) {
        auto& st = t.scales[k];
        for (auto* v : {&st.piece, &st.smooth, &st.a, &st.omega, &st.omega_tilde}) *v *= t.scale;
        st.G = Graw[k] * t.scale;
        t.f0 -= st.smooth;
    }

    // cutoffs: denominator over k < j in the same class; empty or zero denominator gives zeta = 0
    for (int k = 0; k < J; ++k) {
        auto& st = t.scales[k];
        const int j = st.j;
        st.zeta = GridFunction(s);
        const double wj = std::ldexp(1.0, j);
        for (size_t i = 0; i < st.zeta.size(); ++i) {
            double den = 0.0;
            for (int jk = j - t.R; jk >= p.j_min; jk -= t.R) den += std::ldexp(1.0, jk) * t.scales[idx(jk)].omega[i];
            st.zeta[i] = den > 0.0 ? zeta(wj * st.omega[i] / den) : 0.0;
        }
        st.h = GridFunction(s);
        st.g = GridFunction(s);
        st.U = GridFunction(s);
        for (size_t i = 0; i < st.zeta.size(); ++i) {
            const double z = st.zeta[i];
            st.h[i] = (1.0 - z) * st.smooth[i];
            st.g[i] = z * st.smooth[i];
            st.U[i] = (1.0 - z) * st.omega[i];
        }
        t.h += st.h;
        t.g += st.g;
    }

    // h~ = sum_j h_j prod_{j' > j} (1 - U_j')
    t.h_tilde = GridFunction(s);
    {
        GridFunction P(s, 1.0);
        for (int k = J - 1; k >= 0; --k) {
            const auto& st = t.scales[k];
            for (size_t i = 0; i < P.size(); ++i) {
                t.h_tilde[i] += st.h[i] * P[i];
                P[i] *= 1.0 - st.U[i];
            }
        }
    }
    // g~ per residue class
    t.g_tilde = GridFunction(s);
    std::map<int, std::vector<int>> cls;
    for (int j = p.j_min; j <= p.j_max; ++j) cls[mod(j, t.R)].push_back(j);
    for (const auto& [c, js] : cls) {
        t.classes.push_back(js);
        GridFunction P(s, 1.0);
        for (auto it = js.rbegin(); it != js.rend(); ++it) {
            const auto& st = t.scales[idx(*it)];
            for (size_t i = 0; i < P.size(); ++i) {
                t.g_tilde[i] += st.g[i] * P[i];
                P[i] *= 1.0 - st.G[i];
            }
        }
    }
    t.F = t.g_tilde + t.h_tilde;
    t.F_out = t.F * (1.0 / t.scale);
    return t;
}

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

}  // namespace

DerivativeReport derivative_report(const KernelBank& bank, const BBTrace& t, double noise_floor) {
    const GradedGroup& G = bank.group();
    const int Q = G.hom_dim(), n1 = G.n1();
    const auto& p = t.params;
    const GridSpec& s = t.f.spec();
    const size_t total = s.size();
    DerivativeReport r;
    std::vector<long> pool_n(n1, 0), pool_ok(n1, 0);

    for (const auto& st : t.scales) {
        r.js.push_back(st.j);
        const double wmax = st.omega.max_abs();
        std::vector<GridFunction> X;
        for (int k = 1; k <= n1; ++k) X.push_back(omega_xk(bank, st.a, st.omega, st.j, p, k));
        std::vector<Quantiles> qs;
        double x1r = 0.0, xkr = 0.0;
        const double s1 = std::ldexp(1.0, st.j), sk = std::ldexp(1.0, st.j - p.sigma);
        for (int k = 1; k < n1; ++k) {
            Quantiles q;
            std::vector<double> rk, r1;
            long ordered = 0;
            for (size_t i = 0; i < total; ++i) {
                const double w = st.omega[i];
                if (!(w > noise_floor * wmax) || w <= 0.0) continue;
                const double a1 = std::abs(X[0][i]), ak = std::abs(X[k][i]);
                ++q.nodes;
                if (ak <= a1) ++ordered;
                rk.push_back(ak / w);
                r1.push_back(a1 / w);
                xkr = std::max(xkr, ak / (sk * w));
            }
            q.frac_ordered = q.nodes ? (double)ordered / q.nodes : 1.0;
            q.median_k = median(rk);
            q.median_1 = median(r1);
            pool_n[k] += q.nodes;
            pool_ok[k] += ordered;
            if (q.median_1 > 0.0) r.worst_gain = std::max(r.worst_gain, q.median_k / q.median_1);
            qs.push_back(q);
        }
        for (size_t i = 0; i < total; ++i) {
            const double w = st.omega[i];
            if (w > noise_floor * wmax && w > 0.0) x1r = std::max(x1r, std::abs(X[0][i]) / (s1 * w));
        }
        r.anisotropy.push_back(std::move(qs));
        r.x1_ratio.push_back(x1r);
        r.xk_ratio.push_back(xkr);

        for (size_t i = 0; i < total; ++i) {
            if (st.a[i] > 1e-14) r.dom_a_omega = std::max(r.dom_a_omega, st.omega[i] > 0.0 ? st.a[i] / st.omega[i] : INFINITY);
            if (st.omega[i] > 1e-14)
                r.dom_omega_tilde = std::max(r.dom_omega_tilde, st.omega_tilde[i] > 0.0 ? st.omega[i] / st.omega_tilde[i] : INFINITY);
            const double ah = std::abs(st.h[i]), ag = std::abs(st.g[i]);
            if (ah > 1e-14) r.h_dom = std::max(r.h_dom, st.U[i] > 0.0 ? ah / st.U[i] : INFINITY);
            if (ag > 1e-14) r.g_dom = std::max(r.g_dom, st.G[i] > 0.0 ? ag / st.G[i] : INFINITY);
        }
        const double tb = std::ldexp(1.0, p.N * Q) * std::pow(2.0, (double)p.sigma * (Q - 1)) * t.grad_f;
        if (tb > 0.0) r.tilde_bound = std::max(r.tilde_bound, st.omega_tilde.max_abs() / tb);
    }

    for (int k = 1; k < n1; ++k)
        if (pool_n[k]) r.pooled_ordered = std::min(r.pooled_ordered, (double)pool_ok[k] / pool_n[k]);

    // selection bound and sup_j 2^j w_j
    GridFunction sup(s);
    for (size_t i = 0; i < total; ++i) {
        double m = 0.0;
        for (const auto& st : t.scales) m = std::max(m, std::ldexp(st.omega[i], st.j));
        sup[i] = m;
        if (m <= 0.0) continue;
        for (const auto& js : t.classes) {
            double run = 0.0, sel = 0.0;
            for (int j : js) {
                const double v = std::ldexp(t.scales[j - p.j_min].omega[i], j);
                if (v > 0.5 * run) sel += v;
                run += v;
            }
            r.selection_ratio = std::max(r.selection_ratio, sel / m);
        }
    }
    const double den = std::pow(2.0, p.sigma * (Q - 1.0) / Q) * t.grad_f;
    r.sup_ratio = den > 0.0 ? lp_norm(sup, (double)Q) / den : 0.0;

    r.h_tilde_sup = t.h_tilde.max_abs();
    r.g_tilde_sup = t.g_tilde.max_abs();
    {
        GridFunction orig = t.f * (1.0 / t.scale);
        GridFunction e = orig - t.F_out;
        for (int k = 1; k <= n1; ++k) r.good_dir.push_back(lp_norm(xk(G, k, e), (double)Q));
    }
    {
        GridFunction e = t.f0 + t.g + t.h - t.f;
        const double fm = t.f.max_abs();
        r.split_defect = fm > 0.0 ? e.max_abs() / fm : e.max_abs();
    }
    std::vector<const GridFunction*> U, Gs;
    r.u_min = r.g_min = 1e300;
    r.u_max = r.g_max = -1e300;
    for (const auto& st : t.scales) {
        U.push_back(&st.U);
        for (size_t i = 0; i < total; ++i) {
            r.u_min = std::min(r.u_min, st.U[i]);
            r.u_max = std::max(r.u_max, st.U[i]);
            r.g_min = std::min(r.g_min, st.G[i]);
            r.g_max = std::max(r.g_max, st.G[i]);
        }
    }
    r.identity_defect = product_identity_defect(U);
    std::tie(r.ladder_u_lo, r.ladder_u_hi) = ladder_range(U);
    r.ladder_g_lo = 1e300;
    r.ladder_g_hi = -1e300;
    for (const auto& js : t.classes) {
        Gs.clear();
        for (int j : js) Gs.push_back(&t.scales[j - p.j_min].G);
        auto [lo, hi] = ladder_range(Gs);
        r.ladder_g_lo = std::min(r.ladder_g_lo, lo);
        r.ladder_g_hi = std::max(r.ladder_g_hi, hi);
    }
    return r;
}

}  // namespace hg
