#include "hgroup/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hg {

GridSpec::GridSpec(std::vector<int> n, std::vector<double> l) : N(std::move(n)), L(std::move(l)) {
    validate();
}

GridSpec GridSpec::cube(int dim, int n, double l) {
    return GridSpec(std::vector<int>(dim, n), std::vector<double>(dim, l));
}

void GridSpec::validate() const {
    if (N.empty() || N.size() != L.size())
        throw Error(ErrorCode::InvalidArgument, "grid spec: N and L must have equal nonzero length");
    for (size_t a = 0; a < N.size(); ++a) {
        if (N[a] < 3 || N[a] % 2 == 0)
            throw Error(ErrorCode::InvalidArgument, "grid spec: point counts must be odd and >= 3");
        if (!(L[a] > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spec: extents must be positive");
    }
}

size_t GridSpec::size() const {
    size_t s = 1;
    for (int n : N) s *= (size_t)n;
    return s;
}

double GridSpec::cell() const {
    double c = 1.0;
    for (int a = 0; a < dim(); ++a) c *= h(a);
    return c;
}

std::vector<size_t> GridSpec::strides() const {
    std::vector<size_t> s(N.size());
    size_t acc = 1;
    for (int a = dim() - 1; a >= 0; --a) {
        s[a] = acc;
        acc *= (size_t)N[a];
    }
    return s;
}

void GridSpec::node(size_t flat, double* x) const {
    for (int a = dim() - 1; a >= 0; --a) {
        x[a] = coord(a, (int)(flat % N[a]));
        flat /= N[a];
    }
}

void require_same(const GridSpec& a, const GridSpec& b, const char* what) {
    if (a != b) throw Error(ErrorCode::SpecMismatch, std::string(what) + ": grid specs differ");
}

GridFunction::GridFunction(const GridSpec& s, double fill) : spec_(s), v_(s.size(), fill) {}

GridFunction::GridFunction(const GridSpec& s, std::vector<double> v) : spec_(s), v_(std::move(v)) {
    if (v_.size() != s.size()) throw Error(ErrorCode::DimensionMismatch, "value count does not match grid");
}

GridFunction GridFunction::sample(const GridSpec& s, const std::function<double(const double*)>& f) {
    GridFunction g(s);
    std::vector<double> x(s.dim());
    for (size_t i = 0; i < g.size(); ++i) {
        s.node(i, x.data());
        g.v_[i] = f(x.data());
    }
    return g;
}

double GridFunction::at(const double* x) const {
    // zero extension first, then multilinear interpolation
    const int d = spec_.dim();
    int i0[32];
    double w[32];
    for (int a = 0; a < d; ++a) {
        double u = (x[a] + spec_.L[a]) / spec_.h(a);
        if (!(u > -1.0 && u < spec_.N[a])) return 0.0;
        int i = (int)std::floor(u);
        i0[a] = i;
        w[a] = u - i;
    }
    size_t st[32];
    size_t acc = 1;
    for (int a = d - 1; a >= 0; --a) {
        st[a] = acc;
        acc *= (size_t)spec_.N[a];
    }
    double s = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
        double wt = 1.0;
        size_t idx = 0;
        bool inside = true;
        for (int a = 0; a < d; ++a) {
            int b = (corner >> a) & 1;
            int ia = i0[a] + b;
            if (ia < 0 || ia >= spec_.N[a]) {
                inside = false;
                break;
            }
            wt *= b ? w[a] : 1.0 - w[a];
            idx += (size_t)ia * st[a];
        }
        if (inside && wt != 0.0) s += wt * v_[idx];
    }
    return s;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same(spec_, o.spec_, "add");
    for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_same(spec_, o.spec_, "subtract");
    for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    for (auto& v : v_) v *= s;
    return *this;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
    GridFunction r(*this);
    r += o;
    return r;
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
    GridFunction r(*this);
    r -= o;
    return r;
}

GridFunction GridFunction::operator*(double s) const {
    GridFunction r(*this);
    r *= s;
    return r;
}

GridFunction GridFunction::abs() const {
    return map([](double v) { return std::abs(v); });
}

GridFunction GridFunction::pointwise(const GridFunction& o) const {
    require_same(spec_, o.spec_, "pointwise");
    GridFunction r(*this);
    for (size_t i = 0; i < v_.size(); ++i) r.v_[i] *= o.v_[i];
    return r;
}

GridFunction GridFunction::map(const std::function<double(double)>& f) const {
    GridFunction r(*this);
    for (auto& v : r.v_) v = f(v);
    return r;
}

double GridFunction::integral() const {
    double s = 0.0;
    for (double v : v_) s += v;
    return s * spec_.cell();
}

double GridFunction::moment(int a) const {
    auto st = spec_.strides();
    double s = 0.0;
    for (size_t i = 0; i < v_.size(); ++i) {
        int ia = (int)((i / st[a]) % spec_.N[a]);
        s += spec_.coord(a, ia) * v_[i];
    }
    return s * spec_.cell();
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : v_) m = std::max(m, std::abs(v));
    return m;
}

bool GridFunction::is_zero() const {
    for (double v : v_)
        if (v != 0.0) return false;
    return true;
}

double lp_norm(const GridFunction& f, double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be in [1, inf]");
    if (std::isinf(p)) return f.max_abs();
    double m = f.max_abs();
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::abs(v) / m, p);
    return m * std::pow(s * f.spec().cell(), 1.0 / p);
}

double lp_norm(const std::vector<GridFunction>& f, double p) {
    if (f.empty()) return 0.0;
    GridFunction mag(f[0].spec());
    for (const auto& c : f) {
        require_same(c.spec(), mag.spec(), "lp_norm");
        for (size_t i = 0; i < mag.size(); ++i) mag[i] += c[i] * c[i];
    }
    for (auto& v : mag.values()) v = std::sqrt(v);
    return lp_norm(mag, p);
}

double l2_rel(const GridFunction& a, const GridFunction& b) {
    double d = lp_norm(a - b, 2.0), n = lp_norm(b, 2.0);
    return n > 0.0 ? d / n : d;
}

GridFunction dilate_grid(const GradedGroup& G, const GridFunction& f, double lambda, double amp) {
    const auto& s = f.spec();
    if (s.dim() != G.dim()) throw Error(ErrorCode::DimensionMismatch, "grid and group dimensions differ");
    std::vector<double> sc(G.dim());
    for (int a = 0; a < G.dim(); ++a) sc[a] = std::pow(lambda, G.layer(a));
    return GridFunction::sample(s, [&](const double* x) {
        double y[32];
        for (int a = 0; a < G.dim(); ++a) y[a] = sc[a] * x[a];
        return amp * f.at(y);
    });
}

double edge_ratio(const GridFunction& f) {
    const auto& s = f.spec();
    double mx = f.max_abs();
    if (mx == 0.0) return 0.0;
    std::vector<double> x(s.dim());
    auto st = s.strides();
    double e = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        bool edge = false;
        for (int a = 0; a < s.dim(); ++a) {
            int ia = (int)((i / st[a]) % s.N[a]);
            if (ia == 0 || ia == s.N[a] - 1) edge = true;
        }
        if (edge) e = std::max(e, std::abs(f[i]));
    }
    return e / mx;
}

void write_grid(const GridFunction& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    const auto& s = f.spec();
    out << "HGRID 1\n";
    out << "dims " << s.dim() << "\n";
    out << "N";
    for (int n : s.N) out << ' ' << n;
    out << "\nL";
    out << std::setprecision(17);
    for (double l : s.L) out << ' ' << l;
    out << "\ndtype f64le\n";
    out << "data\n";
    out.write(reinterpret_cast<const char*>(f.data()), (std::streamsize)(f.size() * sizeof(double)));
}

GridFunction read_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("HGRID", 0) != 0) throw Error(ErrorCode::IoError, path + ": not a grid file");
    int dims = -1;
    std::vector<int> N;
    std::vector<double> L;
    std::string dtype;
    while (std::getline(in, line)) {
        if (line == "data") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "dims") {
            ls >> dims;
        } else if (key == "N") {
            int v;
            while (ls >> v) N.push_back(v);
        } else if (key == "L") {
            double v;
            while (ls >> v) L.push_back(v);
        } else if (key == "dtype") {
            ls >> dtype;
        } else {
            throw Error(ErrorCode::IoError, path + ": unknown header key '" + key + "'");
        }
    }
    if (dtype != "f64le") throw Error(ErrorCode::IoError, path + ": unsupported dtype '" + dtype + "'");
    if ((int)N.size() != dims || (int)L.size() != dims) throw Error(ErrorCode::IoError, path + ": bad header");
    GridSpec s(N, L);
    std::vector<double> v(s.size());
    in.read(reinterpret_cast<char*>(v.data()), (std::streamsize)(v.size() * sizeof(double)));
    if ((size_t)in.gcount() != v.size() * sizeof(double)) throw Error(ErrorCode::IoError, path + ": truncated payload");
    return GridFunction(s, std::move(v));
}

void write_csv(const GridFunction& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    const auto& s = f.spec();
    for (int a = 0; a < s.dim(); ++a) out << "x" << (a + 1) << ',';
    out << "value\n";
    out << std::setprecision(17);
    std::vector<double> x(s.dim());
    for (size_t i = 0; i < f.size(); ++i) {
        s.node(i, x.data());
        for (double c : x) out << c << ',';
        out << f[i] << '\n';
    }
}

}  // namespace hg
