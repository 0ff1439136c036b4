#include "hgroup/dbarb.hpp"

#include <algorithm>
#include <memory>
#include <cmath>

#include "hgroup/calculus.hpp"
#include "hgroup/errors.hpp"

namespace hg {

CField& CField::operator+=(const CField& o) {
    re += o.re;
    im += o.im;
    return *this;
}

CField& CField::operator-=(const CField& o) {
    re -= o.re;
    im -= o.im;
    return *this;
}

CField CField::operator*(double s) const { return CField(re * s, im * s); }

CField CField::operator*(std::complex<double> c) const {
    return CField(re * c.real() - im * c.imag(), re * c.imag() + im * c.real());
}

std::vector<MultiIndex> multi_indices(int n, int q) {
    std::vector<MultiIndex> out;
    if (q < 0 || q > n) return out;
    MultiIndex a(q);
    for (int i = 0; i < q; ++i) a[i] = i + 1;
    while (true) {
        out.push_back(a);
        int i = q - 1;
        while (i >= 0 && a[i] == n - q + i + 1) --i;
        if (i < 0) break;
        ++a[i];
        for (int k = i + 1; k < q; ++k) a[k] = a[k - 1] + 1;
    }
    return out;
}

int wedge_sign(int k, const MultiIndex& a, MultiIndex* out) {
    if (std::find(a.begin(), a.end(), k) != a.end()) return 0;
    MultiIndex u(a);
    auto it = std::lower_bound(u.begin(), u.end(), k);
    const int pos = (int)(it - u.begin());
    u.insert(it, k);
    if (out) *out = std::move(u);
    return pos % 2 ? -1 : 1;
}

int interior_sign(int k, const MultiIndex& a, MultiIndex* out) {
    auto it = std::find(a.begin(), a.end(), k);
    if (it == a.end()) return 0;
    const int pos = (int)(it - a.begin());
    MultiIndex u(a);
    u.erase(u.begin() + pos);
    if (out) *out = std::move(u);
    return pos % 2 ? -1 : 1;
}

FormField::FormField(int n_, int q_, const GridSpec& s) : n(n_), q(q_), spec(s) {
    if (n < 1 || q < 0 || q > n)
        throw Error(ErrorCode::DegreeError, "(0," + std::to_string(q) + ") forms need 0 <= q <= n = " + std::to_string(n));
    for (const auto& a : multi_indices(n, q)) coef.emplace(a, CField(s));
}

void FormField::validate() const {
    if (q < 0 || q > n) throw Error(ErrorCode::DegreeError, "form degree out of range");
    const auto idx = multi_indices(n, q);
    if (coef.size() != idx.size()) throw Error(ErrorCode::InvalidArgument, "form index set incomplete");
    for (const auto& a : idx) {
        auto it = coef.find(a);
        if (it == coef.end()) throw Error(ErrorCode::InvalidArgument, "form index set incomplete");
        if (it->second.re.spec() != spec || it->second.im.spec() != spec)
            throw Error(ErrorCode::SpecMismatch, "form coefficients on different grids");
    }
}

CField& FormField::operator[](const MultiIndex& a) {
    auto it = coef.find(a);
    if (it == coef.end()) throw Error(ErrorCode::InvalidArgument, "no such multi-index in this form");
    return it->second;
}

const CField& FormField::operator[](const MultiIndex& a) const {
    auto it = coef.find(a);
    if (it == coef.end()) throw Error(ErrorCode::InvalidArgument, "no such multi-index in this form");
    return it->second;
}

namespace {

void same_shape(const FormField& a, const FormField& b, const char* what) {
    if (a.n != b.n || a.q != b.q) throw Error(ErrorCode::DegreeError, std::string(what) + ": degree mismatch");
    require_same(a.spec, b.spec, what);
}

std::vector<GridFunction> parts(const FormField& u) {
    std::vector<GridFunction> v;
    for (const auto& [a, c] : u.coef) {
        v.push_back(c.re);
        v.push_back(c.im);
    }
    return v;
}

}  // namespace

FormField& FormField::operator+=(const FormField& o) {
    same_shape(*this, o, "form +");
    for (auto& [a, c] : coef) c += o[a];
    return *this;
}

FormField& FormField::operator-=(const FormField& o) {
    same_shape(*this, o, "form -");
    for (auto& [a, c] : coef) c -= o[a];
    return *this;
}

FormField FormField::operator+(const FormField& o) const {
    FormField r(*this);
    r += o;
    return r;
}

FormField FormField::operator-(const FormField& o) const {
    FormField r(*this);
    r -= o;
    return r;
}

FormField FormField::operator*(double s) const {
    FormField r(*this);
    for (auto& [a, c] : r.coef) c = c * s;
    return r;
}

bool FormField::is_zero() const {
    for (const auto& [a, c] : coef)
        if (!c.is_zero()) return false;
    return true;
}

double FormField::norm(double p) const {
    if (coef.empty()) return 0.0;
    return lp_norm(parts(*this), p);
}

double FormField::sup() const {
    const size_t m = spec.size();
    double s = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (const auto& [a, c] : coef) acc += c.re[i] * c.re[i] + c.im[i] * c.im[i];
        s = std::max(s, acc);
    }
    return std::sqrt(s);
}

double FormField::grad_norm(const GradedGroup& G, double p) const {
    std::vector<GridFunction> v;
    for (const auto& g : parts(*this))
        for (auto& d : nabla_b(G, g)) v.push_back(std::move(d));
    return v.empty() ? 0.0 : lp_norm(v, p);
}

int heisenberg_n(const GradedGroup& G) {
    const auto& d = G.layer_dims();
    if (d.size() != 2 || d[1] != 1 || d[0] % 2 || G.name().rfind("heisenberg", 0) != 0)
        throw Error(ErrorCode::InvalidArgument, "the dbar_b complex is only set up on H^n, got " + G.name());
    return d[0] / 2;
}

CField z_field(const GradedGroup& G, int k, const CField& u) {
    const int n = heisenberg_n(G);
    GridFunction ar = xk(G, k, u.re), ai = xk(G, k, u.im);
    GridFunction br = xk(G, k + n, u.re), bi = xk(G, k + n, u.im);
    return CField((ar + bi) * 0.5, (ai - br) * 0.5);
}

CField zbar_field(const GradedGroup& G, int k, const CField& u) {
    const int n = heisenberg_n(G);
    GridFunction ar = xk(G, k, u.re), ai = xk(G, k, u.im);
    GridFunction br = xk(G, k + n, u.re), bi = xk(G, k + n, u.im);
    return CField((ar - bi) * 0.5, (ai + br) * 0.5);
}

namespace {

// transpose of Z_k as a real-linear map: (X_k^T + i X_{k+n}^T)/2
CField z_transpose(const GradedGroup& G, int k, int n, const CField& u) {
    GridFunction ar = xk_transpose(G, k, u.re), ai = xk_transpose(G, k, u.im);
    GridFunction br = xk_transpose(G, k + n, u.re), bi = xk_transpose(G, k + n, u.im);
    return CField((ar - bi) * 0.5, (ai + br) * 0.5);
}

void check_form(const GradedGroup& G, const FormField& u) {
    const int n = heisenberg_n(G);
    if (u.n != n) throw Error(ErrorCode::DimensionMismatch, "form built for n = " + std::to_string(u.n));
    u.validate();
}

}  // namespace

FormField dbar_b(const GradedGroup& G, const FormField& u) {
    check_form(G, u);
    if (u.q >= u.n) throw Error(ErrorCode::DegreeError, "dbar_b of a top-degree form");
    FormField r(u.n, u.q + 1, u.spec);
    for (const auto& [a, c] : u.coef) {
        if (c.is_zero()) continue;
        for (int k = 1; k <= u.n; ++k) {
            MultiIndex b;
            const int s = wedge_sign(k, a, &b);
            if (s == 0) continue;
            r[b] += zbar_field(G, k, c) * (double)s;
        }
    }
    return r;
}

FormField dbar_b_star(const GradedGroup& G, const FormField& u) {
    check_form(G, u);
    if (u.q == 0) throw Error(ErrorCode::DegreeError, "dbar_b* of a function");
    FormField r(u.n, u.q - 1, u.spec);
    for (const auto& [a, c] : u.coef) {
        if (c.is_zero()) continue;
        for (int k : a) {
            MultiIndex b;
            const int s = interior_sign(k, a, &b);
            r[b] -= z_field(G, k, c) * (double)s;
        }
    }
    return r;
}

FormField dbar_b_star_transpose(const GradedGroup& G, const FormField& w) {
    check_form(G, w);
    if (w.q >= w.n) throw Error(ErrorCode::DegreeError, "transpose of dbar_b* into degree above n");
    FormField r(w.n, w.q + 1, w.spec);
    for (const auto& [g, c] : w.coef) {
        if (c.is_zero()) continue;
        for (int k = 1; k <= w.n; ++k) {
            MultiIndex a;
            if (wedge_sign(k, g, &a) == 0) continue;
            const int s = interior_sign(k, a, nullptr);
            r[a] -= z_transpose(G, k, w.n, c) * (double)s;
        }
    }
    return r;
}

std::complex<double> pairing(const FormField& u, const FormField& v) {
    same_shape(u, v, "pairing");
    double re = 0.0, im = 0.0;
    for (const auto& [a, cu] : u.coef) {
        const CField& cv = v[a];
        for (size_t i = 0; i < cu.re.size(); ++i) {
            // u conj(v)
            re += cu.re[i] * cv.re[i] + cu.im[i] * cv.im[i];
            im += cu.im[i] * cv.re[i] - cu.re[i] * cv.im[i];
        }
    }
    const double c = u.spec.cell();
    return {re * c, im * c};
}

// ---- solver ----

SolverState iterative_solve(const GradedGroup& G, const FormField& f, const Corrector& corr, const SolveParams& p) {
    check_form(G, f);
    const int n = f.n;
    if (f.q >= n) throw Error(ErrorCode::DegreeError, "no (0,q+1) forms above degree n");
    if (f.q == n - 1)
        throw Error(ErrorCode::UnsupportedDegree,
                    "q = n-1 leaves no free direction for the bounded approximation");
    const double Q = G.hom_dim();
    SolverState st;
    st.residual = f;
    st.Y = FormField(n, f.q + 1, f.spec);
    st.f_norm = f.norm(Q);
    if (st.f_norm == 0.0) {
        st.converged = true;
        return st;
    }
    double prev = st.f_norm;
    for (int k = 0; k < p.max_iter; ++k) {
        if (p.target > 0.0 && prev <= p.target * st.f_norm) break;
        FormField beta = corr(st.residual, k);
        if (beta.n != n || beta.q != f.q + 1) throw Error(ErrorCode::DegreeError, "corrector returned the wrong degree");
        st.residual -= dbar_b_star(G, beta);
        SolverStep s;
        s.residual = st.residual.norm(Q);
        s.ratio = s.residual / prev;
        s.beta_sup = beta.sup();
        s.beta_grad = beta.grad_norm(G, Q);
        s.A = (s.beta_sup + s.beta_grad) / prev;
        st.A_max = std::max(st.A_max, s.A);
        st.Y += beta;
        st.steps.push_back(s);
        if (s.ratio > 0.5 * (1.0 + p.slack)) {
            st.contract_broken = true;
            st.note = "step " + std::to_string(k) + ": residual ratio " + std::to_string(s.ratio) + " > 1/2";
            if (p.abort_on_violation) throw Error(ErrorCode::ContractViolation, st.note);
            break;
        }
        prev = s.residual;
    }
    st.y_sup = st.Y.sup();
    st.y_grad = st.Y.grad_norm(G, Q);
    st.converged = p.target > 0.0 ? prev <= p.target * st.f_norm : !st.contract_broken;
    if (p.target > 0.0 && !st.converged && !st.contract_broken)
        throw Error(ErrorCode::MaxIterExceeded,
                    "residual " + std::to_string(prev / st.f_norm) + " ||f|| after " + std::to_string(p.max_iter) + " steps");
    return st;
}

Corrector synthetic_corrector(const FormField& preimage) {
    auto P = std::make_shared<FormField>(preimage);
    return [P](const FormField&, int) {
        *P = *P * 0.5;
        return *P;
    };
}

namespace {

double dot(const FormField& a, const FormField& b) { return pairing(a, b).real(); }

}  // namespace

FormField least_squares(const GradedGroup& G, const FormField& r, const LSParams& p, int* iters) {
    const double Q = G.hom_dim();
    const double rq = r.norm(Q);
    FormField x(r.n, r.q + 1, r.spec);
    if (rq == 0.0) return x;
    FormField res = r;
    FormField s = dbar_b_star_transpose(G, res);
    FormField d = s;
    double gamma = dot(s, s);
    int it = 0;
    for (; it < p.max_cg && gamma > 0.0; ++it) {
        FormField q = dbar_b_star(G, d);
        const double qq = dot(q, q);
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        x += d * alpha;
        res -= q * alpha;
        if (res.norm(Q) <= p.reduce * rq) {
            ++it;
            break;
        }
        s = dbar_b_star_transpose(G, res);
        const double g2 = dot(s, s);
        d = s + d * (g2 / gamma);
        gamma = g2;
    }
    if (iters) *iters = it;
    return x;
}

Corrector least_squares_corrector(const GradedGroup& G, const LSParams& p) {
    return [G, p](const FormField& r, int) { return least_squares(G, r, p); };
}

GridFunction swap_pair(const GridFunction& f, int n, int i) {
    if (i == 1) return f;
    const GridSpec& s = f.spec();
    const int a0 = 0, a1 = i - 1, b0 = n, b1 = n + i - 1;
    if (s.N[a0] != s.N[a1] || s.N[b0] != s.N[b1] || s.L[a0] != s.L[a1] || s.L[b0] != s.L[b1])
        throw Error(ErrorCode::SpecMismatch, "pair swap needs matching axes");
    const auto st = s.strides();
    const int d = s.dim();
    GridFunction out(s);
    std::vector<int> idx(d, 0);
    for (size_t flat = 0; flat < s.size(); ++flat) {
        size_t rem = flat;
        for (int a = 0; a < d; ++a) {
            idx[a] = (int)(rem / st[a]);
            rem %= st[a];
        }
        std::swap(idx[a0], idx[a1]);
        std::swap(idx[b0], idx[b1]);
        size_t to = 0;
        for (int a = 0; a < d; ++a) to += idx[a] * st[a];
        out[to] = f[flat];
    }
    return out;
}

Corrector bb_corrector(const GradedGroup& G, const KernelBank& bank, const LSParams& ls, const BBParams& bb) {
    return [G, &bank, ls, bb](const FormField& r, int) {
        FormField beta = least_squares(G, r, ls);
        const int n = r.n;
        for (auto& [I, c] : beta.coef) {
            int free = 0;
            for (int i = 1; i <= n && !free; ++i)
                if (std::find(I.begin(), I.end(), i) == I.end()) free = i;
            for (GridFunction* part : {&c.re, &c.im}) {
                if (part->is_zero()) continue;
                GridFunction g = swap_pair(*part, n, free);
                auto t = approximate(bank, g, bb);
                *part = swap_pair(t.F_out, n, free);
            }
        }
        return beta;
    };
}

// ---- duality ----

DualityReport duality_check(const GradedGroup& G, const FormField& u, const FormField& phi, const FormField* alpha,
                            const FormField* beta, double tol) {
    check_form(G, u);
    same_shape(u, phi, "duality_check");
    const double Q = G.hom_dim();
    DualityReport r;
    FormField rebuilt(u.n, u.q, u.spec);
    if (alpha) {
        if (alpha->q != u.q + 1) throw Error(ErrorCode::DegreeError, "alpha must have degree q+1");
        rebuilt += dbar_b_star(G, *alpha);
    }
    if (beta) {
        if (beta->q != u.q - 1) throw Error(ErrorCode::DegreeError, "beta must have degree q-1");
        rebuilt += dbar_b(G, *beta);
    }
    const double pn = phi.norm(2.0);
    r.decomposition_residual = (phi - rebuilt).norm(2.0) / (pn > 0.0 ? pn : 1.0);
    if (r.decomposition_residual > tol)
        throw Error(ErrorCode::DecompositionResidual,
                    "phi differs from the supplied decomposition by " + std::to_string(r.decomposition_residual));
    r.lhs = pairing(u, phi);
    if (alpha) {
        FormField du = dbar_b(G, u);
        r.alpha_term = pairing(du, *alpha);
        r.du_l1 = du.norm(1.0);
        r.alpha_sup = alpha->sup();
        r.alpha_grad = alpha->grad_norm(G, Q);
    }
    if (beta) {
        FormField ds = dbar_b_star(G, u);
        r.beta_term = pairing(ds, *beta);
        r.dsu_l1 = ds.norm(1.0);
        r.beta_sup = beta->sup();
        r.beta_grad = beta->grad_norm(G, Q);
    }
    const double den = u.norm(2.0) * pn;
    r.identity_residual = den > 0.0 ? std::abs(r.lhs - r.alpha_term - r.beta_term) / den : 0.0;
    r.holder_bound = r.du_l1 * r.alpha_sup + r.dsu_l1 * r.beta_sup;
    r.holder_ok = std::abs(r.lhs) <= r.holder_bound * (1.0 + 1e-9) + 1e-300;
    return r;
}

}  // namespace hg
