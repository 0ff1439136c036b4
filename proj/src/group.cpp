#include "hgroup/group.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hg {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidStructure: return "InvalidStructure";
        case ErrorCode::NotStratified: return "NotStratified";
        case ErrorCode::GradingViolation: return "GradingViolation";
        case ErrorCode::JacobiViolation: return "JacobiViolation";
        case ErrorCode::SpecMismatch: return "SpecMismatch";
        case ErrorCode::UnsupportedStep: return "UnsupportedStep";
        case ErrorCode::ResolutionError: return "ResolutionError";
        case ErrorCode::NonzeroMean: return "NonzeroMean";
        case ErrorCode::SmallnessViolation: return "SmallnessViolation";
        case ErrorCode::DegreeError: return "DegreeError";
        case ErrorCode::UnsupportedDegree: return "UnsupportedDegree";
        case ErrorCode::ContractViolation: return "ContractViolation";
        case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
        case ErrorCode::DecompositionResidual: return "DecompositionResidual";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::UnknownKind: return "UnknownKind";
    }
    return "Error";
}

double Poly::eval(const double* v) const {
    double s = 0.0;
    for (const auto& t : terms) {
        double p = t.c;
        for (int i = 0; i < nvars; ++i)
            for (int r = 0; r < t.e[i]; ++r) p *= v[i];
        s += p;
    }
    return s;
}

Poly Poly::derivative(int var) const {
    Poly out{nvars, {}};
    for (const auto& t : terms) {
        if (t.e[var] == 0) continue;
        Monomial mo = t;
        mo.c *= t.e[var];
        mo.e[var] -= 1;
        out.terms.push_back(mo);
    }
    return out;
}

Poly Poly::zero_vars(int from, int to) const {
    Poly out{nvars, {}};
    for (const auto& t : terms) {
        bool keep = true;
        for (int i = from; i < to; ++i)
            if (t.e[i] != 0) keep = false;
        if (keep) out.terms.push_back(t);
    }
    return out;
}

namespace {

// dense-keyed polynomial used during construction
using PMap = std::map<std::vector<int>, double>;
using Elem = std::vector<PMap>;  // one polynomial per basis vector

void add_into(PMap& a, const PMap& b, double s) {
    for (const auto& [k, v] : b) a[k] += s * v;
}

PMap pmul(const PMap& a, const PMap& b) {
    PMap r;
    for (const auto& [ka, va] : a)
        for (const auto& [kb, vb] : b) {
            std::vector<int> k(ka.size());
            for (size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
            r[k] += va * vb;
        }
    return r;
}

Poly to_poly(const PMap& p, int nv) {
    Poly out{nv, {}};
    for (const auto& [k, v] : p)
        if (std::abs(v) > 1e-14) out.terms.push_back({v, k});
    return out;
}

// free associative algebra in two letters, truncated at a given word length
using Series = std::map<std::string, double>;

Series smul(const Series& a, const Series& b, size_t maxlen) {
    Series r;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b)
            if (wa.size() + wb.size() <= maxlen) r[wa + wb] += ca * cb;
    return r;
}

// log(exp(X) exp(Y)) up to words of length m
Series bch_series(int m) {
    Series W;
    std::vector<double> fact(m + 1, 1.0);
    for (int i = 1; i <= m; ++i) fact[i] = fact[i - 1] * i;
    for (int a = 0; a <= m; ++a)
        for (int b = 0; a + b <= m; ++b) {
            if (a + b == 0) continue;
            W[std::string(a, 'X') + std::string(b, 'Y')] = 1.0 / (fact[a] * fact[b]);
        }
    Series out, pw = W;
    for (int k = 1; k <= m; ++k) {
        double s = ((k % 2) ? 1.0 : -1.0) / k;
        for (const auto& [w, c] : pw) out[w] += s * c;
        pw = smul(pw, W, m);
    }
    return out;
}

}  // namespace

GradedGroup build_group(int m, const std::vector<int>& dims,
                        const std::vector<StructureConstant>& sc,
                        const std::string& name) {
    if (m < 1 || (int)dims.size() != m)
        throw Error(ErrorCode::InvalidArgument, "step and layer dims disagree");
    for (int d : dims)
        if (d < 1) throw Error(ErrorCode::InvalidArgument, "layer dims must be positive");

    GradedGroup G;
    G.m_ = m;
    G.dims_ = dims;
    G.name_ = name;
    G.sc_ = sc;
    int n = 0;
    for (int j = 0; j < m; ++j) {
        for (int r = 0; r < dims[j]; ++r) G.layer_.push_back(j + 1);
        n += dims[j];
        G.Q_ += (j + 1) * dims[j];
    }
    G.n_ = n;
    int mf = 1;
    for (int i = 2; i <= m; ++i) mf *= i;
    G.two_mfact_ = 2 * mf;

    auto& c = G.c_;
    c.assign((size_t)n * n * n, 0.0);
    std::vector<char> set((size_t)n * n * n, 0);
    for (const auto& s : sc) {
        int i = s.i - 1, j = s.j - 1, k = s.k - 1;
        if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n)
            throw Error(ErrorCode::InvalidStructure, "structure constant index out of range");
        if (i == j) {
            if (s.c != 0.0) throw Error(ErrorCode::InvalidStructure, "[X_i, X_i] must vanish");
            continue;
        }
        size_t a = ((size_t)i * n + j) * n + k, b = ((size_t)j * n + i) * n + k;
        if (set[b] && std::abs(c[b] + s.c) > 1e-12)
            throw Error(ErrorCode::InvalidStructure, "structure constants not antisymmetric");
        c[a] = s.c;
        c[b] = -s.c;
        set[a] = set[b] = 1;
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = c[((size_t)i * n + j) * n + k];
                if (v != 0.0 && G.layer_[k] != G.layer_[i] + G.layer_[j])
                    throw Error(ErrorCode::GradingViolation,
                                "[X_" + std::to_string(i + 1) + ", X_" + std::to_string(j + 1) +
                                    "] has a component off the graded pattern");
            }

    auto C = [&](int i, int j, int k) { return c[((size_t)i * n + j) * n + k]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int p = 0; p < n; ++p)
                        s += C(i, j, p) * C(p, k, l) + C(j, k, p) * C(p, i, l) + C(k, i, p) * C(p, j, l);
                    if (std::abs(s) > 1e-10)
                        throw Error(ErrorCode::JacobiViolation,
                                    "Jacobi identity fails for (" + std::to_string(i + 1) + "," +
                                        std::to_string(j + 1) + "," + std::to_string(k + 1) + ")");
                }

    // V_1 generates: [V_1, V_{j-1}] must span V_j
    int off = dims[0];
    for (int j = 1; j < m; ++j) {
        int lo = off, hi = off + dims[j];
        int prev_lo = off - dims[j - 1];
        std::vector<std::vector<double>> rows;
        for (int a = 0; a < dims[0]; ++a)
            for (int b = prev_lo; b < off; ++b) {
                std::vector<double> r(dims[j]);
                for (int k = lo; k < hi; ++k) r[k - lo] = C(a, b, k);
                rows.push_back(r);
            }
        int rank = 0;
        for (int col = 0; col < dims[j] && rank < (int)rows.size(); ++col) {
            int piv = -1;
            double best = 1e-12;
            for (int r = rank; r < (int)rows.size(); ++r)
                if (std::abs(rows[r][col]) > best) best = std::abs(rows[r][col]), piv = r;
            if (piv < 0) continue;
            std::swap(rows[rank], rows[piv]);
            for (int r = 0; r < (int)rows.size(); ++r) {
                if (r == rank) continue;
                double f = rows[r][col] / rows[rank][col];
                for (int q = 0; q < dims[j]; ++q) rows[r][q] -= f * rows[rank][q];
            }
            ++rank;
        }
        if (rank < dims[j])
            throw Error(ErrorCode::NotStratified,
                        "layer " + std::to_string(j + 1) + " not generated by the first layer");
        off = hi;
    }

    // group law through the Dynkin form of log(exp X exp Y)
    const int nv = 2 * n;
    auto var = [&](int v) {
        PMap p;
        std::vector<int> e(nv, 0);
        e[v] = 1;
        p[e] = 1.0;
        return p;
    };
    Elem X(n), Y(n);
    for (int i = 0; i < n; ++i) {
        X[i] = var(i);
        Y[i] = var(n + i);
    }
    auto bracket = [&](const Elem& A, const Elem& B) {
        Elem R(n);
        for (int i = 0; i < n; ++i) {
            if (A[i].empty()) continue;
            for (int j = 0; j < n; ++j) {
                if (B[j].empty()) continue;
                PMap prod;
                bool any = false;
                for (int k = 0; k < n; ++k)
                    if (C(i, j, k) != 0.0) any = true;
                if (!any) continue;
                prod = pmul(A[i], B[j]);
                for (int k = 0; k < n; ++k)
                    if (C(i, j, k) != 0.0) add_into(R[k], prod, C(i, j, k));
            }
        }
        return R;
    };
    std::map<std::string, Elem> memo;
    std::function<Elem(const std::string&)> rnorm = [&](const std::string& w) -> Elem {
        auto it = memo.find(w);
        if (it != memo.end()) return it->second;
        Elem r;
        if (w.size() == 1)
            r = (w[0] == 'X') ? X : Y;
        else
            r = bracket(w[0] == 'X' ? X : Y, rnorm(w.substr(1)));
        memo[w] = r;
        return r;
    };
    Elem Z(n);
    for (const auto& [w, coef] : bch_series(m)) {
        if (std::abs(coef) < 1e-15) continue;
        Elem r = rnorm(w);
        for (int k = 0; k < n; ++k) add_into(Z[k], r[k], coef / (double)w.size());
    }
    G.law_.resize(n);
    for (int k = 0; k < n; ++k) G.law_[k] = to_poly(Z[k], nv);

    // vector-field coefficients: derivative of the law at the identity
    G.left_.resize((size_t)n * n);
    G.right_.resize((size_t)n * n);
    for (int k = 0; k < n; ++k)
        for (int kp = 0; kp < n; ++kp) {
            Poly dl = G.law_[kp].derivative(n + k).zero_vars(n, nv);
            Poly l{n, {}};
            for (auto t : dl.terms) {
                t.e.resize(n);
                l.terms.push_back(t);
            }
            G.left_[(size_t)k * n + kp] = l;
            Poly dr = G.law_[kp].derivative(k).zero_vars(0, n);
            Poly r{n, {}};
            for (auto t : dr.terms) {
                std::vector<int> e(t.e.begin() + n, t.e.end());
                r.terms.push_back({t.c, e});
            }
            G.right_[(size_t)k * n + kp] = r;
        }

    // detect the additive/bilinear-last-coordinate structure
    bool ok = true;
    for (int k = 0; k + 1 < n && ok; ++k) {
        const auto& P = G.law_[k];
        if (P.terms.size() != 2) ok = false;
        for (const auto& t : P.terms) {
            int deg = 0;
            for (int v : t.e) deg += v;
            if (deg != 1 || !(t.e[k] == 1 || t.e[n + k] == 1) || std::abs(t.c - 1.0) > 1e-14) ok = false;
        }
    }
    std::vector<double> B((size_t)std::max(n - 1, 0) * std::max(n - 1, 0), 0.0);
    if (ok) {
        for (const auto& t : G.law_[n - 1].terms) {
            int deg = 0;
            for (int v : t.e) deg += v;
            if (deg == 1) {
                if (!(t.e[n - 1] == 1 || t.e[2 * n - 1] == 1)) ok = false;
                continue;
            }
            int a = -1, b = -1;
            for (int v = 0; v < n - 1; ++v) {
                if (t.e[v] == 1) a = v;
                if (t.e[n + v] == 1) b = v;
            }
            if (deg != 2 || a < 0 || b < 0) {
                ok = false;
                break;
            }
            // (x . y^{-1})_n picks up -beta x_a y_b
            B[(size_t)a * (n - 1) + b] = -t.c;
        }
    }
    G.bilinear_ = ok;
    if (ok) G.B_ = B;
    return G;
}

GradedGroup heisenberg(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "heisenberg(n) needs n >= 1");
    std::vector<StructureConstant> sc;
    for (int k = 1; k <= n; ++k) sc.push_back({k, k + n, 2 * n + 1, -4.0});
    return build_group(2, {2 * n, 1}, sc, "heisenberg" + std::to_string(n));
}

GradedGroup abelian(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "abelian(n) needs n >= 1");
    return build_group(1, {n}, {}, "abelian" + std::to_string(n));
}

GradedGroup engel() {
    return build_group(3, {2, 1, 1}, {{1, 2, 3, 1.0}, {1, 3, 4, 1.0}}, "engel");
}

GradedGroup group_by_name(const std::string& id) {
    if (id == "engel") return engel();
    auto num = [&](const std::string& pre) -> int {
        std::string rest = id.substr(pre.size());
        if (!rest.empty() && rest[0] == '(') rest = rest.substr(1, rest.size() - 2);
        try {
            return std::stoi(rest);
        } catch (...) {
            throw Error(ErrorCode::InvalidArgument, "bad group id '" + id + "'");
        }
    };
    if (id.rfind("heisenberg", 0) == 0) return heisenberg(num("heisenberg"));
    if (id.rfind("abelian", 0) == 0) return abelian(num("abelian"));
    return load_group(id);
}

GradedGroup parse_group(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    std::vector<int> dims;
    std::vector<StructureConstant> sc;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        for (char& ch : line)
            if (ch == ',' || ch == '(' || ch == ')') ch = ' ';
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "dims") {
            int d;
            while (ls >> d) dims.push_back(d);
        } else if (key == "c") {
            StructureConstant s{};
            if (!(ls >> s.i >> s.j >> s.k >> s.c))
                throw Error(ErrorCode::IoError, name + ":" + std::to_string(ln) + ": malformed constant");
            sc.push_back(s);
        } else {
            throw Error(ErrorCode::IoError, name + ":" + std::to_string(ln) + ": unknown key '" + key + "'");
        }
    }
    if (dims.empty()) throw Error(ErrorCode::IoError, name + ": missing dims line");
    return build_group((int)dims.size(), dims, sc, name);
}

GradedGroup load_group(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot open group descriptor " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_group(ss.str(), path);
}

static void check_dim(const GradedGroup& G, const Point& x) {
    if ((int)x.size() != G.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "point has " + std::to_string(x.size()) + " coords, group has " + std::to_string(G.dim()));
}

Point mul(const GradedGroup& G, const Point& x, const Point& y) {
    check_dim(G, x);
    check_dim(G, y);
    const int n = G.dim();
    std::vector<double> v(2 * n);
    std::copy(x.begin(), x.end(), v.begin());
    std::copy(y.begin(), y.end(), v.begin() + n);
    Point z(n);
    for (int k = 0; k < n; ++k) z[k] = G.law(k).eval(v.data());
    return z;
}

Point inverse(const GradedGroup& G, const Point& x) {
    check_dim(G, x);
    Point r(x);
    for (auto& v : r) v = -v;
    return r;
}

Point dilate(const GradedGroup& G, double lambda, const Point& x) {
    check_dim(G, x);
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "dilation factor must be positive");
    Point r(x);
    for (int k = 0; k < G.dim(); ++k) r[k] *= std::pow(lambda, G.layer(k));
    return r;
}

double hnorm(const GradedGroup& G, const double* x) {
    const int E = G.norm_exponent();
    double s = 0.0;
    for (int k = 0; k < G.dim(); ++k) s = std::max(s, std::pow(std::abs(x[k]), 1.0 / G.layer(k)));
    if (s == 0.0) return 0.0;
    double acc = 0.0;
    for (int k = 0; k < G.dim(); ++k) {
        double u = std::abs(x[k]) / std::pow(s, G.layer(k));
        acc += std::pow(u, (double)E / G.layer(k));
    }
    return s * std::pow(acc, 1.0 / E);
}

double hnorm(const GradedGroup& G, const Point& x) {
    check_dim(G, x);
    return hnorm(G, x.data());
}

Point sigma_point(const GradedGroup& G, int sigma, const Point& x) {
    check_dim(G, x);
    if (sigma < 0) throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");
    Point r(x);
    r[0] *= std::ldexp(1.0, sigma);
    return dilate(G, std::ldexp(1.0, -sigma), r);
}

double hnorm_sigma(const GradedGroup& G, int sigma, const double* x) {
    const int n = G.dim();
    double buf[32];
    if (n > 32) throw Error(ErrorCode::DimensionMismatch, "dimension above 32 not supported");
    for (int k = 0; k < n; ++k) buf[k] = x[k] * std::ldexp(1.0, -sigma * G.layer(k));
    buf[0] = x[0];
    return hnorm(G, buf);
}

double hnorm_sigma(const GradedGroup& G, int sigma, const Point& x) {
    check_dim(G, x);
    if (sigma < 0) throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");
    return hnorm_sigma(G, sigma, x.data());
}

}  // namespace hg
