#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hgroup/group.hpp"

namespace hg {

struct GridSpec {
    std::vector<int> N;     // odd, >= 3
    std::vector<double> L;  // box [-L_i, L_i]

    GridSpec() = default;
    GridSpec(std::vector<int> n, std::vector<double> l);
    static GridSpec cube(int dim, int n, double l);

    int dim() const { return (int)N.size(); }
    double h(int a) const { return 2.0 * L[a] / (N[a] - 1); }
    size_t size() const;
    double cell() const;  // product of spacings
    double coord(int a, int i) const { return -L[a] + i * h(a); }
    std::vector<size_t> strides() const;
    void node(size_t flat, double* x) const;
    bool operator==(const GridSpec& o) const { return N == o.N && L == o.L; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
    void validate() const;
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const GridSpec& s, double fill = 0.0);
    GridFunction(const GridSpec& s, std::vector<double> v);

    static GridFunction sample(const GridSpec& s, const std::function<double(const double*)>& f);

    const GridSpec& spec() const { return spec_; }
    size_t size() const { return v_.size(); }
    double& operator[](size_t i) { return v_[i]; }
    double operator[](size_t i) const { return v_[i]; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    // multilinear interpolation, zero outside the box
    double at(const double* x) const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double s);
    GridFunction operator+(const GridFunction& o) const;
    GridFunction operator-(const GridFunction& o) const;
    GridFunction operator*(double s) const;
    GridFunction abs() const;
    GridFunction pointwise(const GridFunction& o) const;
    GridFunction map(const std::function<double(double)>& f) const;

    double integral() const;
    // int x_a f(x) dx
    double moment(int a) const;
    double max_abs() const;
    bool is_zero() const;

private:
    GridSpec spec_;
    std::vector<double> v_;
};

void require_same(const GridSpec& a, const GridSpec& b, const char* what);

double lp_norm(const GridFunction& f, double p);
// L^p norm of a tuple (pointwise Euclidean length)
double lp_norm(const std::vector<GridFunction>& f, double p);
double l2_rel(const GridFunction& a, const GridFunction& b);

// f(lambda . x) sampled by interpolation, scaled by `amp`
GridFunction dilate_grid(const GradedGroup& G, const GridFunction& f, double lambda, double amp);

// boundary-face leakage: max over faces / max over box
double edge_ratio(const GridFunction& f);

void write_grid(const GridFunction& f, const std::string& path);
GridFunction read_grid(const std::string& path);
void write_csv(const GridFunction& f, const std::string& path);

}  // namespace hg
