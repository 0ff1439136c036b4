#include <fftw3.h>

#include <cmath>
#include <complex>

#include "hgroup/lp.hpp"

namespace hg {

namespace {

using cplx = std::complex<double>;

// n-d DFT over the whole grid; sign -1 forward, +1 backward (unnormalized)
std::vector<cplx> dft(const GridSpec& s, std::vector<cplx> v, int sign) {
    std::vector<int> dims(s.N.begin(), s.N.end());
    fftw_plan p = fftw_plan_dft((int)dims.size(), dims.data(), reinterpret_cast<fftw_complex*>(v.data()),
                                reinterpret_cast<fftw_complex*>(v.data()), sign, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    return v;
}

// signed frequency index of array position q on an axis of odd length N
inline int freq_index(int q, int N) { return q <= (N - 1) / 2 ? q : q - N; }

// Fourier splitting at the level of coordinate derivatives: phi = sum_a partial(g_a)
std::vector<GridFunction> coordinate_pieces(const GridFunction& phi, const DecompParams& p) {
    const GridSpec& s = phi.spec();
    const int n = s.dim();
    std::vector<GridFunction> coord;
    const size_t total = s.size();
    const auto st = s.strides();
    const double cell = s.cell();

    std::vector<cplx> A(total);
    for (size_t i = 0; i < total; ++i) A[i] = phi[i];
    A = dft(s, std::move(A), FFTW_FORWARD);

    // phi_hat(xi) = cell * exp(2 pi i k M / N) * A[k]; we keep the phase in a per-axis table
    std::vector<std::vector<cplx>> phase(n);
    std::vector<std::vector<double>> xi_of(n), sig_of(n);
    for (int a = 0; a < n; ++a) {
        const int N = s.N[a], M = (N - 1) / 2;
        phase[a].resize(N);
        xi_of[a].resize(N);
        sig_of[a].resize(N);
        for (int q = 0; q < N; ++q) {
            int k = freq_index(q, N);
            phase[a][q] = std::polar(1.0, 2.0 * M_PI * k * M / N);
            xi_of[a][q] = k / (N * s.h(a));
            // symbol of the central difference, so that sum_a partial(g_a) reproduces phi
            sig_of[a][q] = std::sin(2.0 * M_PI * xi_of[a][q] * s.h(a)) / (2.0 * M_PI * s.h(a));
        }
    }

    // nonzero support of phi for the direct small-frequency sums
    std::vector<size_t> supp;
    for (size_t i = 0; i < total; ++i)
        if (phi[i] != 0.0) supp.push_back(i);
    std::vector<double> xs(supp.size() * n);
    for (size_t m = 0; m < supp.size(); ++m) s.node(supp[m], &xs[m * n]);

    std::vector<std::vector<cplx>> M(n, std::vector<cplx>(total));
    std::vector<double> xi(n), sg(n);
    std::vector<int> q(n);
    std::vector<cplx> T(n);
    for (size_t idx = 0; idx < total; ++idx) {
        double r2 = 0.0, g2 = 0.0;
        cplx ph(1.0, 0.0);
        for (int a = 0; a < n; ++a) {
            q[a] = (int)((idx / st[a]) % s.N[a]);
            xi[a] = xi_of[a][q[a]];
            sg[a] = sig_of[a][q[a]];
            r2 += xi[a] * xi[a];
            g2 += sg[a] * sg[a];
            ph *= phase[a][q[a]];
        }
        const double r = std::sqrt(r2);
        // eta radii are angular frequencies, |2 pi xi|
        const double eta = 1.0 - smoothstep((2.0 * M_PI * r - p.eta_in) / (p.eta_out - p.eta_in));
        const cplx fh = cell * ph * A[idx];
        if (eta > 0.0) {
            // int_0^1 d_i phi_hat(s xi) ds by a direct sum; K(u) = (1 - e^{-iu}) / (iu)
            std::fill(T.begin(), T.end(), cplx(0.0, 0.0));
            for (size_t m = 0; m < supp.size(); ++m) {
                const double* x = &xs[m * n];
                double u = 0.0;
                for (int a = 0; a < n; ++a) u += xi[a] * x[a];
                u *= 2.0 * M_PI;
                cplx K;
                if (std::abs(u) < 1e-6)
                    K = cplx(1.0 - u * u / 6.0, -u / 2.0);
                else
                    K = (1.0 - std::polar(1.0, -u)) / cplx(0.0, u);
                const cplx w = phi[supp[m]] * K;
                for (int a = 0; a < n; ++a) T[a] += x[a] * w;
            }
            cplx defect = fh;
            for (int a = 0; a < n; ++a) {
                cplx sa = cell * cplx(0.0, -2.0 * M_PI) * T[a];
                cplx big = g2 > 0.0 ? sg[a] * fh / g2 : cplx(0.0, 0.0);
                M[a][idx] = eta * sa + (1.0 - eta) * big;
                defect -= sg[a] * M[a][idx];
            }
            // s_a solves the continuous symbol; project onto sum_a sg_a m_a = phi_hat
            if (g2 > 0.0)
                for (int a = 0; a < n; ++a) M[a][idx] += sg[a] * defect / g2;
        } else if (g2 >= 0.25 * r2) {
            for (int a = 0; a < n; ++a) M[a][idx] = sg[a] * fh / g2;
        } else {
            // near the grid Nyquist the difference symbol degenerates; those modes are not
            // resolved anyway, and inverting sg there would blow them up into checkerboards
            for (int a = 0; a < n; ++a) M[a][idx] = xi[a] * fh / r2;
        }
    }

    // coordinate pieces g_a with phi = sum_a d_a g_a: g_a_hat = m_a / (2 pi i)
    coord.reserve(n);
    for (int a = 0; a < n; ++a) {
        std::vector<cplx> B(total);
        for (size_t idx = 0; idx < total; ++idx) {
            cplx ph(1.0, 0.0);
            for (int b = 0; b < n; ++b) ph *= phase[b][(idx / st[b]) % s.N[b]];
            B[idx] = std::conj(ph) * M[a][idx] / cplx(0.0, 2.0 * M_PI);
        }
        B = dft(s, std::move(B), FFTW_BACKWARD);
        GridFunction g(s);
        const double scale = 1.0 / (cell * (double)total);
        for (size_t idx = 0; idx < total; ++idx) g[idx] = B[idx].real() * scale;
        coord.push_back(std::move(g));
    }
    return coord;
}

// embed in a box with N' = pad (N - 1) + 1 nodes per axis, same spacing, centered
GridFunction embed(const GridFunction& f, int pad) {
    const GridSpec& s = f.spec();
    std::vector<int> N(s.dim());
    std::vector<double> L(s.dim());
    for (int a = 0; a < s.dim(); ++a) {
        N[a] = pad * (s.N[a] - 1) + 1;
        L[a] = pad * s.L[a];
    }
    GridSpec big(N, L);
    GridFunction out(big);
    auto st = s.strides(), bt = big.strides();
    for (size_t i = 0; i < f.size(); ++i) {
        size_t j = 0;
        for (int a = 0; a < s.dim(); ++a) j += ((i / st[a]) % s.N[a] + (size_t)(N[a] - s.N[a]) / 2) * bt[a];
        out[j] = f[i];
    }
    return out;
}

GridFunction crop(const GridFunction& big, const GridSpec& s) {
    const GridSpec& b = big.spec();
    GridFunction out(s);
    auto st = s.strides(), bt = b.strides();
    for (size_t i = 0; i < out.size(); ++i) {
        size_t j = 0;
        for (int a = 0; a < s.dim(); ++a) j += ((i / st[a]) % s.N[a] + (size_t)(b.N[a] - s.N[a]) / 2) * bt[a];
        out[i] = big[j];
    }
    return out;
}

}  // namespace

Decomposition decompose_zero_mean(const GradedGroup& G, const GridFunction& phi, FieldSide side,
                                  const DecompParams& p) {
    const GridSpec& s = phi.spec();
    if (s.dim() != G.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and group dimensions differ");
    const int n = G.dim(), n1 = G.n1();
    // conversion table first so UnsupportedStep surfaces before any work
    CoordTable table = side == FieldSide::Right ? coord_from_right_invariant(G) : coord_from_left_invariant(G);

    Decomposition out;
    double l1 = lp_norm(phi, 1.0);
    if (l1 == 0.0) {
        out.comp.assign(n1, GridFunction(s));
        out.coord.assign(n, GridFunction(s));
        out.means.assign(n1, 0.0);
        return out;
    }
    if (std::abs(phi.integral()) > p.eps_mean * l1)
        throw Error(ErrorCode::NonzeroMean, "decompose_zero_mean: |int phi| = " + std::to_string(std::abs(phi.integral())));

    if (p.pad <= 1) {
        out.coord = coordinate_pieces(phi, p);
    } else {
        for (auto& g : coordinate_pieces(embed(phi, p.pad), p)) out.coord.push_back(crop(g, s));
    }
    const size_t total = s.size();
    {
        GridFunction sum(s);
        for (int a = 0; a < n; ++a) sum += partial(out.coord[a], a);
        out.coord_residual = l2_rel(sum, phi);
    }

    // convert with the coordinate table:
    //   c Y_a u  ->  comp_a += c u             (c constant)
    //   c Y_a Y_b u  ->  comp_a += c Y_b u,  comp_b -= (Y_a c) u
    auto field = [&](int k, const GridFunction& u) {
        return side == FieldSide::Right ? xk_right(G, k, u) : xk(G, k, u);
    };
    auto coefs = [&](int k, int kp) -> const Poly& {
        return side == FieldSide::Right ? G.right_coef(k, kp) : G.left_coef(k, kp);
    };
    out.comp.assign(n1, GridFunction(s));
    std::vector<double> x(n);
    for (int row = 0; row < n; ++row) {
        const GridFunction& u = out.coord[row];
        for (const auto& term : table.rows[row]) {
            if (term.word.size() == 1) {
                int a = term.word[0] - 1;
                for (size_t i = 0; i < total; ++i) {
                    s.node(i, x.data());
                    out.comp[a][i] += term.coef.eval(x.data()) * u[i];
                }
            } else if (term.word.size() == 2) {
                int a = term.word[0] - 1, b = term.word[1] - 1;
                GridFunction yb = field(b + 1, u);
                std::vector<Poly> dc;
                for (int kp = 0; kp < n; ++kp) dc.push_back(term.coef.derivative(kp));
                for (size_t i = 0; i < total; ++i) {
                    s.node(i, x.data());
                    double c = term.coef.eval(x.data());
                    double yc = 0.0;
                    for (int kp = 0; kp < n; ++kp) {
                        const Poly& f = coefs(a, kp);
                        if (f.is_zero()) continue;
                        if (!dc[kp].is_zero()) yc += f.eval(x.data()) * dc[kp].eval(x.data());
                    }
                    out.comp[a][i] += c * yb[i];
                    out.comp[b][i] -= yc * u[i];
                }
            } else {
                throw Error(ErrorCode::UnsupportedStep, "coordinate table word longer than 2");
            }
        }
    }
    GridFunction sum(s);
    for (int k = 0; k < n1; ++k) sum += field(k + 1, out.comp[k]);
    out.residual = l2_rel(sum, phi);
    for (const auto& c : out.comp) out.means.push_back(c.integral());
    return out;
}

namespace {

// subtract int(g) * delta_0 so that the discrete integral is exactly zero
void force_zero_mean(GridFunction& g) {
    const auto& s = g.spec();
    auto st = s.strides();
    size_t c = 0;
    for (int a = 0; a < s.dim(); ++a) c += (size_t)((s.N[a] - 1) / 2) * st[a];
    double m = g.integral();
    g[c] -= m / s.cell();
}

}  // namespace

SecondFamily second_family(const KernelBank& bank, int J, const DecompParams& p) {
    const GradedGroup& G = bank.group();
    const int n1 = G.n1();
    SecondFamily fam;
    for (int j = -J; j <= J; ++j) {
        ScalePairs sp;
        sp.j = j;
        const GridFunction& pj = bank.psi(j);
        const GridFunction& pm = bank.psi(j - 1);
        GridFunction d = pj - pm;
        // (X_k Psi_j) * u_k = Psi_j * X_k^R u_k, and v_k * (X_k^R Psi_{j-1}) = (X_k v_k) * Psi_{j-1}
        Decomposition r = decompose_zero_mean(G, d, FieldSide::Right, p);
        Decomposition l = decompose_zero_mean(G, d, FieldSide::Left, p);
        sp.split_residual_right = r.residual;
        sp.split_residual_left = l.residual;
        for (int k = 0; k < n1; ++k) {
            sp.lambda.push_back(xk(G, k + 1, pj));
            sp.xi.push_back(r.comp[k]);
        }
        for (int k = 0; k < n1; ++k) {
            sp.lambda.push_back(l.comp[k]);
            sp.xi.push_back(xk_right(G, k + 1, pm));
        }
        for (auto* v : {&sp.lambda, &sp.xi})
            for (auto& g : *v) force_zero_mean(g);
        fam.scales.push_back(std::move(sp));
    }
    fam.max_mean = 0.0;
    for (const auto& sp : fam.scales)
        for (const auto* v : {&sp.lambda, &sp.xi})
            for (const auto& g : *v) fam.max_mean = std::max(fam.max_mean, std::abs(g.integral()));
    return fam;
}

GridFunction scale_apply(const GradedGroup& G, const ScalePairs& sp, const GridFunction& f) {
    GridFunction out(f.spec());
    for (size_t l = 0; l < sp.lambda.size(); ++l) out += convolve(G, convolve(G, f, sp.lambda[l]), sp.xi[l]);
    return out;
}

GridFunction second_family_apply(const KernelBank& bank, const SecondFamily& fam, const GridFunction& f, int J) {
    GridFunction out(f.spec());
    for (const auto& sp : fam.scales)
        if (std::abs(sp.j) <= J) out += scale_apply(bank.group(), sp, f);
    return out;
}

}  // namespace hg
