#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "hgroup/calculus.hpp"

namespace hg {

struct BankParams {
    int j_min = -4;
    int j_max = 4;
    // Psi-hat = 1 on |xi| <= r_in, 0 on |xi| >= r_out (xi in cycles per unit length)
    double r_in = 1.0;
    double r_out = 2.0;
    double eps_tail = 1e-6;
};

struct KernelInfo {
    std::string name;
    int j = 0;
    double raw_mass = 0.0;  // discrete integral before normalization
    double edge = 0.0;      // edge_ratio of the sample
    bool truncated = false;  // edge > eps_tail: the box cuts the kernel
};

// smooth step: 0 for u <= 0, 1 for u >= 1
double smoothstep(double u);

class KernelBank {
public:
    KernelBank(const GradedGroup& G, const GridSpec& s, BankParams p = {});

    const GradedGroup& group() const { return G_; }
    const GridSpec& spec() const { return s_; }
    const BankParams& params() const { return p_; }

    double psi_profile(double r) const;  // radial profile of Psi (Euclidean radius)
    double heat_profile(const double* x) const;  // e^{-(1+|x|^M)^{1/M}}, M = 2 m!
    double heat_constant() const;               // analytic c with int c*S = 1 over the whole group
    double unit_ball_volume() const;            // |{||x|| <= 1}|, closed form

    // all kernels are L1-normalized dilates 2^{jQ} K(2^j . x); Psi_j and S_j are renormalized
    // so that the discrete integral is 1 and the discrete first-layer moments vanish
    const GridFunction& psi(int j) const;
    GridFunction delta(int j) const;  // Psi_{j+1} - Psi_j
    const GridFunction& heat(int j) const;
    GridFunction heat_p() const;  // S_1 - S_0
    // 2^{jQ} E(2^j . x)^power, sampled from the closed form, no normalization
    const GridFunction& e_kernel(int j, int sigma, int power = 1) const;
    // X_k (1-based) of the same kernel, differentiated in closed form
    GridFunction e_kernel_xk(int j, int sigma, int power, int k) const;

    std::vector<KernelInfo> info() const;

private:
    GridFunction sample_dilate(int j, const std::function<double(const double*)>& k) const;
    GridFunction repair(GridFunction g, const std::string& name, int j) const;

    GradedGroup G_;
    GridSpec s_;
    BankParams p_;
    std::vector<double> table_;  // psi profile samples
    double table_dr_ = 0.0;
    mutable std::map<int, GridFunction> psi_, heat_;
    mutable std::map<std::tuple<int, int, int>, GridFunction> e_;
    mutable std::map<std::string, KernelInfo> info_;
};

struct LPDecomposition {
    int j_min = 0, j_max = -1;
    GridSpec spec;
    std::map<int, GridFunction> pieces;  // Delta_j f
};

LPDecomposition lp_decompose(const KernelBank& bank, const GridFunction& f);
LPDecomposition lp_decompose(const KernelBank& bank, const GridFunction& f, int j_min, int j_max);
GridFunction lp_reconstruct(const LPDecomposition& d);
// (sum_j (2^{j s} |Delta_j f|)^2)^{1/2}
GridFunction square_function(const LPDecomposition& d, double s = 0.0);

struct TelescopeReport {
    double max_abs = 0.0;  // |sum_{a<=j<=b} Delta_j f - (Psi_{b+1} f - Psi_a f)|_inf
    double rel = 0.0;
};
TelescopeReport telescoping_check(const KernelBank& bank, const GridFunction& f, const LPDecomposition& d);

struct MomentReport {
    double mass = 0.0;    // max_j |int Delta_j|
    double first = 0.0;   // max_j max_k |int x_k Delta_j|
    double psi_mass = 0.0;  // max_j |int Psi_j - 1|
    double heat_mass = 0.0;
    double heat_min = 0.0;  // min S sample
    double p_mass = 0.0;    // |int (S_1 - S_0)|
};
MomentReport moment_check(const KernelBank& bank);

struct HeatShapeReport {
    double lo = 0.0, hi = 0.0;  // range of S(x) / e^{-||x||} over the box
    double ratio = 0.0;
};
HeatShapeReport heat_shape(const KernelBank& bank);

// ---- Fourier splitting of a mean-zero function into invariant derivatives

enum class FieldSide { Right, Left };

struct DecompParams {
    double eta_in = 0.5;  // eta = 1 on 2 pi |xi| <= eta_in
    double eta_out = 1.0;
    double eps_mean = 1e-8;  // allowed |int phi| / int |phi|
    int pad = 2;  // transform box = pad x the grid box, keeps periodic images away
};

struct Decomposition {
    std::vector<GridFunction> comp;  // phi^{(k)}, k = 1..n1
    std::vector<GridFunction> coord;  // coordinate-derivative pieces before conversion
    double residual = 0.0;  // ||sum_k X_k^{R or L} phi^{(k)} - phi||_2 / ||phi||_2
    double coord_residual = 0.0;  // same for sum_i d_i coord_i with the same stencils
    std::vector<double> means;  // int phi^{(k)}
};

Decomposition decompose_zero_mean(const GradedGroup& G, const GridFunction& phi, FieldSide side,
                                  const DecompParams& p = {});

// ---- reproducing pairs: delta_0 ~ sum_l sum_j Lambda_j^{(l)} * Xi_j^{(l)}

struct ScalePairs {
    int j = 0;
    std::vector<GridFunction> lambda, xi;  // 2 n1 entries
    double split_residual_right = 0.0, split_residual_left = 0.0;
};

struct SecondFamily {
    std::vector<ScalePairs> scales;  // j = -J..J
    double max_mean = 0.0;           // max |int Lambda|, |int Xi| over all pieces
};

SecondFamily second_family(const KernelBank& bank, int J, const DecompParams& p = {});
// sum_l (f * Lambda_j) * Xi_j for one scale
GridFunction scale_apply(const GradedGroup& G, const ScalePairs& sp, const GridFunction& f);
// sum_l sum_{|j| <= J} (f * Lambda_j) * Xi_j
GridFunction second_family_apply(const KernelBank& bank, const SecondFamily& fam, const GridFunction& f, int J);

// ---- diagnostic inequalities

struct RatioReport {
    bool degenerate = false;
    std::vector<int> js;
    std::vector<double> ratios;
    double sup = 0.0;
};

// ||Delta_j f||_inf / ||grad_b f||_{L^Q}
RatioReport bernstein_check(const KernelBank& bank, const GridFunction& f, const LPDecomposition& d);
// ||(sum (2^j |Delta_j f|)^2)^{1/2}||_p / ||grad_b f||_p, reported per partial range [j_min, j]
RatioReport deriv_lp_check(const KernelBank& bank, const GridFunction& f, const LPDecomposition& d, double p);
// ||(sum |Delta_j f|^2)^{1/2}||_p / ||f||_p
double square_ratio(const GridFunction& f, const LPDecomposition& d, double p);

void save_bank(const KernelBank& bank, const std::string& dir);

}  // namespace hg
