#pragma once

#include <array>
#include <string>
#include <vector>

#include "hgroup/errors.hpp"

namespace hg {

using Point = std::vector<double>;

// sparse polynomial; each monomial carries one exponent per variable
struct Monomial {
    double c = 0.0;
    std::vector<int> e;
};

struct Poly {
    int nvars = 0;
    std::vector<Monomial> terms;

    double eval(const double* v) const;
    bool is_zero() const { return terms.empty(); }
    Poly derivative(int var) const;
    // substitute zero for all variables in [from, to)
    Poly zero_vars(int from, int to) const;
};

struct StructureConstant {
    int i, j, k;  // 1-based: [X_i, X_j] = c X_k
    double c;
};

class GradedGroup {
public:
    int step() const { return m_; }
    int dim() const { return n_; }
    int hom_dim() const { return Q_; }
    const std::vector<int>& layer_dims() const { return dims_; }
    int n1() const { return dims_[0]; }
    // 1-based layer of 0-based coordinate k
    int layer(int k) const { return layer_[k]; }
    int norm_exponent() const { return two_mfact_; }
    const std::string& name() const { return name_; }
    const std::vector<StructureConstant>& constants() const { return sc_; }
    double bracket(int i, int j, int k) const { return c_[(i * n_ + j) * n_ + k]; }

    // group-law polynomial of coordinate k in variables (x_1..x_n, y_1..y_n)
    const Poly& law(int k) const { return law_[k]; }
    // X_k = sum_k' left_coef(k,k')(x) d/dx_k'; likewise for X_k^R
    const Poly& left_coef(int k, int kp) const { return left_[k * n_ + kp]; }
    const Poly& right_coef(int k, int kp) const { return right_[k * n_ + kp]; }

    // all coordinates but the last are additive and the last one of x.y^{-1}
    // is x_n - y_n + sum_{a,b<n} B[a][b] x_a y_b (Heisenberg, abelian)
    bool bilinear_center() const { return bilinear_; }
    const std::vector<double>& center_form() const { return B_; }

    friend GradedGroup build_group(int m, const std::vector<int>& dims,
                                   const std::vector<StructureConstant>& sc,
                                   const std::string& name);

private:
    int m_ = 0, n_ = 0, Q_ = 0, two_mfact_ = 2;
    std::string name_;
    std::vector<int> dims_, layer_;
    std::vector<StructureConstant> sc_;
    std::vector<double> c_;
    std::vector<Poly> law_, left_, right_;
    bool bilinear_ = false;
    std::vector<double> B_;
};

GradedGroup build_group(int m, const std::vector<int>& dims,
                        const std::vector<StructureConstant>& sc,
                        const std::string& name = "custom");

GradedGroup heisenberg(int n);
GradedGroup abelian(int n);
GradedGroup engel();
GradedGroup group_by_name(const std::string& id);

// text descriptor: "dims 2 1" then lines "c i j k value"; '#' comments
GradedGroup load_group(const std::string& path);
GradedGroup parse_group(const std::string& text, const std::string& name = "file");

Point mul(const GradedGroup& G, const Point& x, const Point& y);
Point inverse(const GradedGroup& G, const Point& x);
Point dilate(const GradedGroup& G, double lambda, const Point& x);
double hnorm(const GradedGroup& G, const Point& x);
double hnorm(const GradedGroup& G, const double* x);
Point sigma_point(const GradedGroup& G, int sigma, const Point& x);
double hnorm_sigma(const GradedGroup& G, int sigma, const Point& x);
double hnorm_sigma(const GradedGroup& G, int sigma, const double* x);

}  // namespace hg
