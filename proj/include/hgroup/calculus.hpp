#pragma once

#include <vector>

#include "hgroup/grid.hpp"

namespace hg {

struct ConvStats {
    double tail = 0.0;      // edge leakage of the kernel argument
    bool tail_warning = false;
    bool fast_path = false;
    size_t pairs = 0;
};

// f*g(x) = int f(x.y^{-1}) g(y) dy; midpoint rule, f interpolated with zero extension
GridFunction convolve(const GradedGroup& G, const GridFunction& f, const GridFunction& g,
                      ConvStats* stats = nullptr, double eps_tail = 1e-6);
GridFunction convolve_naive(const GradedGroup& G, const GridFunction& f, const GridFunction& g);

// 1-based k, as in X_1..X_n
GridFunction xk(const GradedGroup& G, int k, const GridFunction& f);
GridFunction xk_right(const GradedGroup& G, int k, const GridFunction& f);
// matrix transpose of the discrete xk operator
GridFunction xk_transpose(const GradedGroup& G, int k, const GridFunction& f);
std::vector<GridFunction> nabla_b(const GradedGroup& G, const GridFunction& f);
// d/dx_a (0-based axis) with second-order stencils, one-sided at the faces
GridFunction partial(const GridFunction& f, int axis);

std::vector<double> default_ladder(const GradedGroup& G, const GridSpec& s, int rungs = 16);
GridFunction maximal(const GradedGroup& G, const GridFunction& f, const std::vector<double>& radii);
// discrete measure of {||y|| <= r} on the grid
double ball_volume(const GradedGroup& G, const GridSpec& s, double r);

struct DerivIdentityReport {
    int k = 0;
    double left = 0.0;     // X_k(f*g) - f*(X_k g)
    double mixed = 0.0;    // (X_k f)*g - f*(X_k^R g)
    double right = 0.0;    // X_k^R(f*g) - (X_k^R f)*g
    double witness = 0.0;  // (X_k f)*g - f*(X_k g)
};

std::vector<DerivIdentityReport> conv_deriv_identities(const GradedGroup& G, const GridFunction& f,
                                                       const GridFunction& g, std::vector<int> ks = {});

// d/dx_i = sum over terms coef(x) * X^R_{w_1} X^R_{w_2} ... (word applied right to left)
struct CoordTerm {
    Poly coef;
    std::vector<int> word;  // 1-based field indices
};

struct CoordTable {
    bool right = true;
    std::vector<std::vector<CoordTerm>> rows;  // one per coordinate
};

CoordTable coord_from_right_invariant(const GradedGroup& G);
CoordTable coord_from_left_invariant(const GradedGroup& G);
GridFunction apply_coord(const GradedGroup& G, const CoordTable& t, int i, const GridFunction& f);

}  // namespace hg
