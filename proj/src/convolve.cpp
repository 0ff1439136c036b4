#include <fftw3.h>

#include <cmath>
#include <complex>

#include "hgroup/calculus.hpp"

namespace hg {

namespace {

using cplx = std::complex<double>;

int fft_size(int minimum) {
    for (int p = minimum;; ++p) {
        int r = p;
        for (int q : {2, 3, 5})
            while (r % q == 0) r /= q;
        if (r == 1) return p;
    }
}

GridFunction convolve_fast(const GradedGroup& G, const GridFunction& f, const GridFunction& g,
                           ConvStats* stats) {
    const GridSpec& s = f.spec();
    const int d = s.dim();
    const int T = d - 1;
    const int Nt = s.N[T];
    const int Mt = (Nt - 1) / 2;
    const double ht = s.h(T);
    const size_t ncol = s.size() / Nt;
    const int P = fft_size(3 * Nt);
    const int H = P / 2 + 1;

    std::vector<int> Ncol(s.N.begin(), s.N.end() - 1), M(T);
    for (int a = 0; a < T; ++a) M[a] = (s.N[a] - 1) / 2;

    std::vector<double> buf(P);
    std::vector<cplx> spec(H);
    fftw_plan fwd = fftw_plan_dft_r2c_1d(P, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                         FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_c2r_1d(P, reinterpret_cast<fftw_complex*>(spec.data()), buf.data(),
                                         FFTW_ESTIMATE);

    auto transform = [&](const GridFunction& u, std::vector<cplx>& out, std::vector<char>& nz) {
        out.assign(ncol * H, cplx(0.0, 0.0));
        nz.assign(ncol, 0);
        for (size_t c = 0; c < ncol; ++c) {
            const double* col = u.data() + c * Nt;
            bool any = false;
            for (int i = 0; i < Nt; ++i)
                if (col[i] != 0.0) any = true;
            if (!any) continue;
            nz[c] = 1;
            std::fill(buf.begin(), buf.end(), 0.0);
            std::copy(col, col + Nt, buf.begin());
            fftw_execute(fwd);
            std::copy(spec.begin(), spec.end(), out.begin() + c * H);
        }
    };
    std::vector<cplx> Fh, Gh;
    std::vector<char> fnz, gnz;
    transform(f, Fh, fnz);
    transform(g, Gh, gnz);

    std::vector<cplx> W(P);
    for (int k = 0; k < P; ++k) W[k] = std::polar(1.0, 2.0 * M_PI * k / P);

    // column multi-index <-> flat
    auto unflat = [&](size_t c, int* idx) {
        for (int a = T - 1; a >= 0; --a) {
            idx[a] = (int)(c % Ncol[a]);
            c /= Ncol[a];
        }
    };
    std::vector<size_t> cst(T);
    {
        size_t acc = 1;
        for (int a = T - 1; a >= 0; --a) {
            cst[a] = acc;
            acc *= Ncol[a];
        }
    }
    const auto& B = G.center_form();
    std::vector<double> hx(T);
    for (int a = 0; a < T; ++a) hx[a] = s.h(a);

    std::vector<int> gcols;
    for (size_t c = 0; c < ncol; ++c)
        if (gnz[c]) gcols.push_back((int)c);

    GridFunction out(s);
    std::vector<cplx> acc(H);
    int ix[32], iy[32];
    double xv[32], yv[32];
    size_t pairs = 0;
    for (size_t cx = 0; cx < ncol; ++cx) {
        unflat(cx, ix);
        for (int a = 0; a < T; ++a) xv[a] = s.coord(a, ix[a]);
        std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
        bool touched = false;
        for (int cy : gcols) {
            unflat(cy, iy);
            size_t cz = 0;
            bool inside = true;
            for (int a = 0; a < T; ++a) {
                int iz = ix[a] - iy[a] + M[a];
                if (iz < 0 || iz >= Ncol[a]) {
                    inside = false;
                    break;
                }
                cz += (size_t)iz * cst[a];
            }
            if (!inside || !fnz[cz]) continue;
            double shift = 0.0;
            if (!B.empty()) {
                for (int a = 0; a < T; ++a) yv[a] = s.coord(a, iy[a]);
                for (int a = 0; a < T; ++a) {
                    if (xv[a] == 0.0) continue;
                    for (int b = 0; b < T; ++b) shift += B[(size_t)a * T + b] * xv[a] * yv[b];
                }
            }
            double sv = shift / ht;
            double fl = std::floor(sv);
            double theta = sv - fl;
            long A = (long)fl + Mt;
            if (A + Nt < 0 || A > 2 * Nt - 2) continue;
            ++pairs;
            touched = true;
            const cplx* fh = Fh.data() + cz * H;
            const cplx* gh = Gh.data() + (size_t)cy * H;
            long a0 = ((A % P) + P) % P;
            long a1 = (a0 + 1) % P;
            long i0 = 0, i1 = 0;
            const double w0 = 1.0 - theta, w1 = theta;
            if (w1 == 0.0) {
                for (int t = 0; t < H; ++t) {
                    acc[t] += fh[t] * gh[t] * W[i0];
                    i0 += a0;
                    if (i0 >= P) i0 -= P;
                }
            } else {
                for (int t = 0; t < H; ++t) {
                    acc[t] += fh[t] * gh[t] * (w0 * W[i0] + w1 * W[i1]);
                    i0 += a0;
                    if (i0 >= P) i0 -= P;
                    i1 += a1;
                    if (i1 >= P) i1 -= P;
                }
            }
        }
        if (!touched) continue;
        std::copy(acc.begin(), acc.end(), spec.begin());
        fftw_execute(bwd);
        const double scale = s.cell() / P;
        double* o = out.data() + cx * Nt;
        for (int i = 0; i < Nt; ++i) o[i] = buf[i] * scale;
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    if (stats) {
        stats->fast_path = true;
        stats->pairs = pairs;
    }
    return out;
}

}  // namespace

GridFunction convolve_naive(const GradedGroup& G, const GridFunction& f, const GridFunction& g) {
    require_same(f.spec(), g.spec(), "convolve");
    const GridSpec& s = f.spec();
    if (s.dim() != G.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and group dimensions differ");
    const int n = G.dim();
    GridFunction out(s);
    std::vector<double> v(2 * n), z(n);
    std::vector<std::pair<size_t, std::vector<double>>> ys;
    for (size_t j = 0; j < g.size(); ++j) {
        if (g[j] == 0.0) continue;
        std::vector<double> y(n);
        s.node(j, y.data());
        ys.push_back({j, y});
    }
    for (size_t i = 0; i < out.size(); ++i) {
        s.node(i, v.data());
        double acc = 0.0;
        for (const auto& [j, y] : ys) {
            for (int a = 0; a < n; ++a) v[n + a] = -y[a];
            for (int k = 0; k < n; ++k) z[k] = G.law(k).eval(v.data());
            acc += f.at(z.data()) * g[j];
        }
        out[i] = acc * s.cell();
    }
    return out;
}

GridFunction convolve(const GradedGroup& G, const GridFunction& f, const GridFunction& g, ConvStats* stats,
                      double eps_tail) {
    require_same(f.spec(), g.spec(), "convolve");
    if (f.spec().dim() != G.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and group dimensions differ");
    if (stats) {
        stats->tail = edge_ratio(g);
        stats->tail_warning = stats->tail > eps_tail;
    }
    if (f.is_zero() || g.is_zero()) return GridFunction(f.spec());
    if (G.bilinear_center()) return convolve_fast(G, f, g, stats);
    if (stats) stats->fast_path = false;
    return convolve_naive(G, f, g);
}

}  // namespace hg
