#pragma once

#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "hgroup/bb.hpp"

namespace hg {

// complex grid function as two real grids
struct CField {
    GridFunction re, im;

    CField() = default;
    explicit CField(const GridSpec& s) : re(s), im(s) {}
    CField(GridFunction r, GridFunction i) : re(std::move(r)), im(std::move(i)) {}

    const GridSpec& spec() const { return re.spec(); }
    CField& operator+=(const CField& o);
    CField& operator-=(const CField& o);
    CField operator*(double s) const;
    CField operator*(std::complex<double> c) const;
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

using MultiIndex = std::vector<int>;  // strictly increasing, letters in 1..n

// all strictly increasing multi-indices of length q over {1..n}, lexicographic
std::vector<MultiIndex> multi_indices(int n, int q);
// dz_k ^ dz^a = sign dz^out; 0 when k is in a. sign = (-1)^(position of k in the sorted union)
int wedge_sign(int k, const MultiIndex& a, MultiIndex* out);
// dz_k _| dz^a = sign dz^out; 0 when k is not in a
int interior_sign(int k, const MultiIndex& a, MultiIndex* out);

struct FormField {
    int n = 1, q = 0;
    GridSpec spec;
    std::map<MultiIndex, CField> coef;

    FormField() = default;
    FormField(int n, int q, const GridSpec& s);  // zero form, all indices present

    void validate() const;
    CField& operator[](const MultiIndex& a);
    const CField& operator[](const MultiIndex& a) const;

    FormField& operator+=(const FormField& o);
    FormField& operator-=(const FormField& o);
    FormField operator+(const FormField& o) const;
    FormField operator-(const FormField& o) const;
    FormField operator*(double s) const;

    bool is_zero() const;
    // L^p norm of the pointwise length sqrt(sum |u_a|^2)
    double norm(double p) const;
    double sup() const;
    // L^p norm of the pointwise length of all X_k re u_a, X_k im u_a
    double grad_norm(const GradedGroup& G, double p) const;
};

// n of H^n; throws InvalidArgument for other groups
int heisenberg_n(const GradedGroup& G);

// Z_k = (X_k - i X_{k+n})/2, Zbar_k = (X_k + i X_{k+n})/2, k in 1..n
CField z_field(const GradedGroup& G, int k, const CField& u);
CField zbar_field(const GradedGroup& G, int k, const CField& u);

FormField dbar_b(const GradedGroup& G, const FormField& u);
FormField dbar_b_star(const GradedGroup& G, const FormField& u);
// exact matrix transpose of the discrete dbar_b_star (real inner product), for least squares
FormField dbar_b_star_transpose(const GradedGroup& G, const FormField& w);

// sum_a <u_a, v_a> with the conjugate on v, midpoint quadrature
std::complex<double> pairing(const FormField& u, const FormField& v);

// ---- iterative solver ----

struct SolverStep {
    double residual = 0.0;  // ||f - dbar_b*(beta_0 + ... + beta_k)||_Q
    double ratio = 0.0;     // residual / previous residual
    double beta_sup = 0.0, beta_grad = 0.0;
    double A = 0.0;         // (beta_sup + beta_grad) / previous residual
};

struct SolverState {
    FormField residual, Y;
    double f_norm = 0.0;
    std::vector<SolverStep> steps;
    double A_max = 0.0;
    double y_sup = 0.0, y_grad = 0.0;
    bool converged = false;
    bool contract_broken = false;
    std::string note;
};

struct SolveParams {
    int max_iter = 10;
    double target = 0.0;   // stop once residual <= target ||f||; 0 runs max_iter steps
    double slack = 1e-12;  // allowed excess over the half reduction
    bool abort_on_violation = true;  // false: stop and record instead of throwing
};

using Corrector = std::function<FormField(const FormField& residual, int step)>;

// f is a (0,q) form; returns Y of degree q+1 with dbar_b* Y close to f
SolverState iterative_solve(const GradedGroup& G, const FormField& f, const Corrector& c, const SolveParams& p);

// knows a preimage P of f and returns half of the current one each step
Corrector synthetic_corrector(const FormField& preimage);

struct LSParams {
    int max_cg = 300;
    double reduce = 0.25;  // CGLS stops once ||r - dbar_b* beta||_Q <= reduce ||r||_Q
};
// least squares for dbar_b* beta = r by CGLS on the grid
FormField least_squares(const GradedGroup& G, const FormField& r, const LSParams& p, int* iters = nullptr);
Corrector least_squares_corrector(const GradedGroup& G, const LSParams& p);

// experimental: least squares, then each coefficient replaced by its bounded approximation,
// with the free direction X_i (i not in the multi-index) moved to X_1 by a pair swap
Corrector bb_corrector(const GradedGroup& G, const KernelBank& bank, const LSParams& ls, const BBParams& bb);

// swap the (x_1, y_1) and (x_i, y_i) axes of a grid on H^n (a group automorphism)
GridFunction swap_pair(const GridFunction& f, int n, int i);

// ---- duality ----

struct DualityReport {
    std::complex<double> lhs, alpha_term, beta_term;
    double identity_residual = 0.0;  // |lhs - terms| / (||u||_2 ||phi||_2)
    double decomposition_residual = 0.0;
    double du_l1 = 0.0, dsu_l1 = 0.0;
    double alpha_sup = 0.0, beta_sup = 0.0, alpha_grad = 0.0, beta_grad = 0.0;
    double holder_bound = 0.0;  // ||dbar_b u||_1 ||alpha||_inf + ||dbar_b* u||_1 ||beta||_inf
    bool holder_ok = false;
};

// phi = dbar_b* alpha + dbar_b beta with either part optional
DualityReport duality_check(const GradedGroup& G, const FormField& u, const FormField& phi, const FormField* alpha,
                            const FormField* beta, double tol = 1e-10);

}  // namespace hg
