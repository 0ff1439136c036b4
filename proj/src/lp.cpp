#include "hgroup/lp.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace hg {

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

namespace {

// composite Gauss-Legendre on [a,b]
template <class F>
double gl_integrate(F&& f, double a, double b, int panels) {
    static gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(10);
    double s = 0.0, w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * w, hi = lo + w;
        for (size_t i = 0; i < tab->n; ++i) {
            double xi, wi;
            gsl_integration_glfixed_point(lo, hi, i, &xi, &wi, tab);
            s += wi * f(xi);
        }
    }
    return s;
}

}  // namespace

KernelBank::KernelBank(const GradedGroup& G, const GridSpec& s, BankParams p) : G_(G), s_(s), p_(p) {
    if (s.dim() != G.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and group dimensions differ");
    if (p.j_min > p.j_max) throw Error(ErrorCode::InvalidArgument, "empty j range");
    if (!(p.r_in > 0.0 && p.r_out > p.r_in)) throw Error(ErrorCode::InvalidArgument, "need 0 < r_in < r_out");

    const int n = G.dim();
    const double nu = n / 2.0 - 1.0;
    const double ri = p.r_in, ro = p.r_out;
    auto b = [&](double rho) { return 1.0 - smoothstep((rho - ri) / (ro - ri)); };
    const double rmax = 12.0 / std::min(1.0, ro - ri) / ri;
    table_dr_ = 1e-3 / ri;
    const int nt = (int)std::ceil(rmax / table_dr_) + 2;
    table_.resize(nt);
    for (int i = 0; i < nt; ++i) {
        double r = i * table_dr_;
        double v;
        if (r < 1e-9) {
            double sphere = n == 1 ? 2.0 : 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
            v = sphere * (std::pow(ri, n) / n + gl_integrate([&](double q) { return b(q) * std::pow(q, n - 1); }, ri, ro, 8));
        } else {
            int panels = 4 + 2 * (int)std::ceil(r * (ro - ri));
            if (n == 1) {
                v = 2.0 * (std::sin(2 * M_PI * ri * r) / (2 * M_PI * r) +
                           gl_integrate([&](double q) { return b(q) * std::cos(2 * M_PI * q * r); }, ri, ro, panels));
            } else {
                double inner = std::pow(ri, nu + 1) * std::cyl_bessel_j(nu + 1, 2 * M_PI * ri * r) / (2 * M_PI * r);
                double outer = gl_integrate(
                    [&](double q) { return b(q) * std::cyl_bessel_j(nu, 2 * M_PI * q * r) * std::pow(q, nu + 1); }, ri,
                    ro, panels);
                v = 2 * M_PI * std::pow(r, -nu) * (inner + outer);
            }
        }
        table_[i] = v;
    }
}

double KernelBank::psi_profile(double r) const {
    double u = r / table_dr_;
    int i = (int)u;
    if (i + 2 >= (int)table_.size()) return 0.0;
    double t = u - i;
    // Catmull-Rom, mirrored at r = 0 (the profile is even)
    double p0 = i == 0 ? table_[1] : table_[i - 1], p1 = table_[i], p2 = table_[i + 1], p3 = table_[i + 2];
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

double KernelBank::heat_profile(const double* x) const {
    const double M = G_.norm_exponent();
    double r = hnorm(G_, x);
    return std::exp(-std::pow(1.0 + std::pow(r, M), 1.0 / M));
}

double KernelBank::unit_ball_volume() const {
    const double M = G_.norm_exponent();
    double lg = 0.0, sum = 0.0;
    for (int k = 0; k < G_.dim(); ++k) {
        double pk = M / G_.layer(k);
        lg += std::lgamma(1.0 + 1.0 / pk);
        sum += 1.0 / pk;
    }
    return std::pow(2.0, G_.dim()) * std::exp(lg - std::lgamma(1.0 + sum));
}

double KernelBank::heat_constant() const {
    const double M = G_.norm_exponent();
    const int Q = G_.hom_dim();
    double I = gl_integrate(
        [&](double r) { return std::exp(-std::pow(1.0 + std::pow(r, M), 1.0 / M)) * std::pow(r, Q - 1); }, 0.0,
        40.0 + 10.0 * Q, 200 + 40 * Q);
    return 1.0 / (Q * unit_ball_volume() * I);
}

GridFunction KernelBank::sample_dilate(int j, const std::function<double(const double*)>& k) const {
    const int n = G_.dim();
    std::vector<double> sc(n);
    for (int a = 0; a < n; ++a) sc[a] = std::ldexp(1.0, j * G_.layer(a));
    const double amp = std::ldexp(1.0, j * G_.hom_dim());
    return GridFunction::sample(s_, [&](const double* x) {
        double y[32];
        for (int a = 0; a < n; ++a) y[a] = sc[a] * x[a];
        return amp * k(y);
    });
}

GridFunction KernelBank::repair(GridFunction g, const std::string& name, int j) const {
    KernelInfo ki;
    ki.name = name;
    ki.j = j;
    ki.raw_mass = g.integral();
    ki.edge = edge_ratio(g);
    ki.truncated = ki.edge > p_.eps_tail;
    if (!(ki.raw_mass > 1e-6))
        throw Error(ErrorCode::ResolutionError,
                    name + " at j=" + std::to_string(j) + ": the box captures almost none of the kernel");
    g *= 1.0 / ki.raw_mass;
    // first-layer moments: subtract d_k times a two-point dipole with unit k-th moment
    auto st = s_.strides();
    size_t c = 0;
    for (int a = 0; a < s_.dim(); ++a) c += (size_t)((s_.N[a] - 1) / 2) * st[a];
    for (int k = 0; k < G_.n1(); ++k) {
        double d = g.moment(k);
        double w = d / (2.0 * s_.h(k) * s_.cell());
        g[c + st[k]] -= w;
        g[c - st[k]] += w;
    }
    info_[name + "_" + std::to_string(j)] = ki;
    return g;
}

const GridFunction& KernelBank::psi(int j) const {
    auto it = psi_.find(j);
    if (it != psi_.end()) return it->second;
    const int n = G_.dim();
    GridFunction g = sample_dilate(j, [&](const double* y) {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += y[a] * y[a];
        return psi_profile(std::sqrt(r2));
    });
    return psi_.emplace(j, repair(std::move(g), "psi", j)).first->second;
}

GridFunction KernelBank::delta(int j) const { return psi(j + 1) - psi(j); }

const GridFunction& KernelBank::heat(int j) const {
    auto it = heat_.find(j);
    if (it != heat_.end()) return it->second;
    GridFunction g = sample_dilate(j, [&](const double* y) { return heat_profile(y); });
    return heat_.emplace(j, repair(std::move(g), "heat", j)).first->second;
}

GridFunction KernelBank::heat_p() const { return heat(1) - heat(0); }

const GridFunction& KernelBank::e_kernel(int j, int sigma, int power) const {
    auto key = std::make_tuple(j, sigma, power);
    auto it = e_.find(key);
    if (it != e_.end()) return it->second;
    const double M = G_.norm_exponent();
    GridFunction g = sample_dilate(j, [&](const double* y) {
        double r = hnorm_sigma(G_, sigma, y);
        return std::exp(-power * std::pow(1.0 + std::pow(r, M), 1.0 / M));
    });
    KernelInfo ki;
    ki.name = "e_sigma" + std::to_string(sigma) + (power == 1 ? "" : "_pow" + std::to_string(power));
    ki.j = j;
    ki.raw_mass = g.integral();
    ki.edge = edge_ratio(g);
    ki.truncated = ki.edge > p_.eps_tail;
    info_[ki.name + "_" + std::to_string(j)] = ki;
    return e_.emplace(key, std::move(g)).first->second;
}

GridFunction KernelBank::e_kernel_xk(int j, int sigma, int power, int k) const {
    const int n = G_.dim();
    if (k < 1 || k > G_.n1()) throw Error(ErrorCode::InvalidArgument, "e_kernel_xk: k out of range");
    const double M = G_.norm_exponent();
    const double amp = std::ldexp(1.0, j * G_.hom_dim());
    std::vector<double> sc(n), sg(n), ex(n);
    for (int a = 0; a < n; ++a) {
        sc[a] = std::ldexp(1.0, j * G_.layer(a));
        sg[a] = a == 0 ? 1.0 : std::ldexp(1.0, -sigma * G_.layer(a));
        ex[a] = M / G_.layer(a);  // even integer
    }
    return GridFunction::sample(s_, [&](const double* x) {
        double w[32], du[32], u = 0.0;
        for (int a = 0; a < n; ++a) {
            w[a] = sc[a] * sg[a] * x[a];
            const double pw = std::pow(w[a], ex[a] - 1.0);
            u += pw * w[a];
            du[a] = ex[a] * pw * sc[a] * sg[a];  // d/dx_a of u
        }
        const double q = std::pow(1.0 + u, 1.0 / M);
        const double f = amp * std::exp(-power * q) * (-power / M) * q / (1.0 + u);
        double acc = 0.0;
        for (int b = 0; b < n; ++b) {
            const double c = G_.left_coef(k - 1, b).eval(x);
            if (c != 0.0) acc += c * du[b];
        }
        return f * acc;
    });
}

std::vector<KernelInfo> KernelBank::info() const {
    std::vector<KernelInfo> v;
    for (const auto& [k, i] : info_) v.push_back(i);
    return v;
}

LPDecomposition lp_decompose(const KernelBank& bank, const GridFunction& f) {
    return lp_decompose(bank, f, bank.params().j_min, bank.params().j_max);
}

LPDecomposition lp_decompose(const KernelBank& bank, const GridFunction& f, int j_min, int j_max) {
    require_same(bank.spec(), f.spec(), "lp_decompose");
    LPDecomposition d;
    d.j_min = j_min;
    d.j_max = j_max;
    d.spec = f.spec();
    for (int j = j_min; j <= j_max; ++j) d.pieces.emplace(j, convolve(bank.group(), f, bank.delta(j)));
    return d;
}

GridFunction lp_reconstruct(const LPDecomposition& d) {
    GridFunction r(d.spec);
    for (const auto& [j, p] : d.pieces) r += p;
    return r;
}

GridFunction square_function(const LPDecomposition& d, double s) {
    GridFunction r(d.spec);
    for (const auto& [j, p] : d.pieces) {
        double w = std::pow(2.0, j * s);
        for (size_t i = 0; i < r.size(); ++i) r[i] += w * w * p[i] * p[i];
    }
    for (auto& v : r.values()) v = std::sqrt(v);
    return r;
}

TelescopeReport telescoping_check(const KernelBank& bank, const GridFunction& f, const LPDecomposition& d) {
    GridFunction lhs = lp_reconstruct(d);
    GridFunction rhs = convolve(bank.group(), f, bank.psi(d.j_max + 1)) - convolve(bank.group(), f, bank.psi(d.j_min));
    TelescopeReport r;
    r.max_abs = lp_norm(lhs - rhs, INFINITY);
    double m = std::max(lhs.max_abs(), f.max_abs());
    r.rel = m > 0.0 ? r.max_abs / m : 0.0;
    return r;
}

MomentReport moment_check(const KernelBank& bank) {
    const auto& p = bank.params();
    const int n1 = bank.group().n1();
    MomentReport r;
    for (int j = p.j_min; j <= p.j_max + 1; ++j) r.psi_mass = std::max(r.psi_mass, std::abs(bank.psi(j).integral() - 1.0));
    for (int j = p.j_min; j <= p.j_max; ++j) {
        GridFunction d = bank.delta(j);
        r.mass = std::max(r.mass, std::abs(d.integral()));
        for (int k = 0; k < n1; ++k) r.first = std::max(r.first, std::abs(d.moment(k)));
    }
    r.heat_min = 1e300;
    for (int j : {0, 1}) {
        const auto& s = bank.heat(j);
        r.heat_mass = std::max(r.heat_mass, std::abs(s.integral() - 1.0));
        for (double v : s.values()) r.heat_min = std::min(r.heat_min, v);
    }
    r.p_mass = std::abs(bank.heat_p().integral());
    return r;
}

HeatShapeReport heat_shape(const KernelBank& bank) {
    const auto& s = bank.spec();
    const auto& S = bank.heat(0);
    std::vector<double> x(s.dim());
    HeatShapeReport r;
    r.lo = 1e300;
    for (size_t i = 0; i < S.size(); ++i) {
        s.node(i, x.data());
        double q = S[i] / std::exp(-hnorm(bank.group(), x.data()));
        r.lo = std::min(r.lo, q);
        r.hi = std::max(r.hi, q);
    }
    r.ratio = r.hi / r.lo;
    return r;
}

RatioReport bernstein_check(const KernelBank& bank, const GridFunction& f, const LPDecomposition& d) {
    const GradedGroup& G = bank.group();
    RatioReport r;
    double g = lp_norm(nabla_b(G, f), G.hom_dim());
    if (!(g > 1e-300)) {
        r.degenerate = true;
        return r;
    }
    for (const auto& [j, p] : d.pieces) {
        r.js.push_back(j);
        r.ratios.push_back(p.max_abs() / g);
        r.sup = std::max(r.sup, r.ratios.back());
    }
    return r;
}

RatioReport deriv_lp_check(const KernelBank& bank, const GridFunction& f, const LPDecomposition& d, double p) {
    const GradedGroup& G = bank.group();
    RatioReport r;
    double g = lp_norm(nabla_b(G, f), p);
    if (!(g > 1e-300)) {
        r.degenerate = true;
        return r;
    }
    GridFunction acc(d.spec);
    for (const auto& [j, piece] : d.pieces) {
        double w = std::ldexp(1.0, j);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += w * w * piece[i] * piece[i];
        GridFunction s = acc.map([](double v) { return std::sqrt(v); });
        r.js.push_back(j);
        r.ratios.push_back(lp_norm(s, p) / g);
        r.sup = std::max(r.sup, r.ratios.back());
    }
    return r;
}

double square_ratio(const GridFunction& f, const LPDecomposition& d, double p) {
    double n = lp_norm(f, p);
    return n > 0.0 ? lp_norm(square_function(d), p) / n : 0.0;
}

void save_bank(const KernelBank& bank, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto& p = bank.params();
    nlohmann::ordered_json m;
    m["group"] = bank.group().name();
    m["psi_fourier_radii"] = {p.r_in, p.r_out};
    m["j_range"] = {p.j_min, p.j_max};
    m["heat_constant_analytic"] = bank.heat_constant();
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (int j = p.j_min; j <= p.j_max + 1; ++j) {
        std::string fn = "psi_" + std::to_string(j) + ".grid";
        write_grid(bank.psi(j), (fs::path(dir) / fn).string());
        files.push_back({{"kernel", "psi"}, {"j", j}, {"file", fn}});
    }
    for (int j : {0, 1}) {
        std::string fn = "heat_" + std::to_string(j) + ".grid";
        write_grid(bank.heat(j), (fs::path(dir) / fn).string());
        files.push_back({{"kernel", "heat"}, {"j", j}, {"file", fn}});
    }
    m["files"] = files;
    nlohmann::ordered_json inf = nlohmann::ordered_json::array();
    for (const auto& k : bank.info())
        inf.push_back({{"kernel", k.name}, {"j", k.j}, {"raw_mass", k.raw_mass}, {"edge", k.edge}, {"truncated", k.truncated}});
    m["kernels"] = inf;
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest in " + dir);
    out << m.dump(2) << "\n";
}

}  // namespace hg
