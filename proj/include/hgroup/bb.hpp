#pragma once

#include <map>
#include <vector>

#include "hgroup/lp.hpp"

namespace hg {

struct BBParams {
    double delta = 0.5;
    int N = 2;
    int sigma = 2;
    double B = 0.0;  // 0: 2(Q+2); must exceed 2(Q+1)
    int R_override = 0;  // experimental: force a small R so that mod-R classes are not singletons
    double c_G = 0.0;    // 0: calibrate from the input (largest value keeping U_j, G_j <= 1)
    int j_min = -2, j_max = 2;
    double eps_tail = 1e-12;
    bool rescale = true;

    int R(int Q) const;
    void validate(int Q) const;
};

// zeta: 1 on [0, 1/2], 0 on [1, inf), smoothstep in between
double zeta(double s);

struct F0Report {
    GridFunction f0;
    double grad_f = 0.0, grad_f0 = 0.0;  // L^Q norms of nabla_b
    double ratio = 0.0;
};
F0Report compute_f0(const KernelBank& bank, const GridFunction& f, int N, int j_min, int j_max);

// a_j = S_{j+N} |Delta_j f| as a grid function
// Riemann form of the lattice l^Q sum: (2^{NQ} (a^Q * (E^Q)_j))^{1/Q}
GridFunction omega(const KernelBank& bank, const GridFunction& a, int j, const BBParams& p);
// X_k w_j with the derivative taken on the kernel: X_k (a^Q * E^Q_j) = a^Q * X_k E^Q_j
GridFunction omega_xk(const KernelBank& bank, const GridFunction& a, const GridFunction& w, int j,
                      const BBParams& p, int k);
// 2^{NQ} a * E_j
GridFunction omega_tilde(const KernelBank& bank, const GridFunction& a, int j, const BBParams& p);

struct LatticeEval {
    double value = 0.0;
    long points = 0;      // lattice points visited
    double dropped = 0.0;  // largest E weight among points cut by the tail rule
};
// the lattice sum itself at one point; a is read by multilinear interpolation, E in closed form
LatticeEval omega_lattice_at(const KernelBank& bank, const GridFunction& a, int j, const BBParams& p,
                             const Point& x, long max_points = 20000000);

struct ScaleTrace {
    int j = 0;
    GridFunction piece;   // Delta_j f
    GridFunction smooth;  // S_{j+N} Delta_j f
    GridFunction a;       // S_{j+N} |Delta_j f|
    GridFunction omega, omega_tilde, zeta;
    GridFunction h, g, U, G;
};

struct BBTrace {
    BBParams params;
    int R = 0;
    double c_G = 0.0;
    double scale = 1.0;      // f was multiplied by this before the construction
    double grad_f = 0.0;     // ||nabla_b f||_{L^Q} of the rescaled input
    double small_bound = 0.0;  // c_G 2^{-NQ} 2^{-sigma(Q-1)}
    GridFunction f, f0, g, h, h_tilde, g_tilde, F;  // all on the rescaled input except F_out
    GridFunction F_out;  // F / scale
    std::vector<ScaleTrace> scales;
    std::vector<std::vector<int>> classes;  // mod-R classes present in the j-range
};

BBTrace approximate(const KernelBank& bank, const GridFunction& f, const BBParams& p);

// 1 - (sum_j a_j prod_{j'<j} (1 - a_j') + prod_j (1 - a_j)), nodewise max over all nodes
double product_identity_defect(const std::vector<const GridFunction*>& a);
// range of sum_j a_j prod_{j'>j} (1 - a_j') over the nodes
std::pair<double, double> ladder_range(const std::vector<const GridFunction*>& a);

struct Quantiles {
    double frac_ordered = 0.0;  // share of nodes with |X_k w| <= |X_1 w|
    double median_k = 0.0, median_1 = 0.0;  // medians of |X_k w|/w and |X_1 w|/w
    long nodes = 0;
};

struct DerivativeReport {
    // per scale, per k >= 2
    std::vector<int> js;
    std::vector<std::vector<Quantiles>> anisotropy;
    // X_k w_j comes from the closed-form kernel derivative (omega_xk); the pooled
    // share runs over all above-noise nodes of all scales, worst k
    double pooled_ordered = 1.0;
    double worst_gain = 0.0;  // max over j, k of median_k / median_1
    std::vector<double> x1_ratio;  // max |X_1 w_j| / (2^j w_j)
    std::vector<double> xk_ratio;  // max_k max |X_k w_j| / (2^{j - sigma} w_j)
    double selection_ratio = 0.0;  // max over nodes and classes of class sum / sup_j 2^j w_j
    double sup_ratio = 0.0;        // ||sup_j 2^j w_j||_Q / (2^{sigma(Q-1)/Q} ||nabla_b f||_Q)
    double dom_a_omega = 0.0;      // max a_j / w_j where a_j > 1e-14
    double dom_omega_tilde = 0.0;  // max w_j / w~_j
    double tilde_bound = 0.0;      // max_j ||w~_j||_inf / (2^{NQ} 2^{sigma(Q-1)} ||nabla_b f||_Q)
    double h_dom = 0.0;            // max |h_j| / U_j
    double g_dom = 0.0;            // max |g_j| / G_j
    double h_tilde_sup = 0.0, g_tilde_sup = 0.0;
    std::vector<double> good_dir;  // ||X_k (f - F)||_{L^Q}, original scale
    double split_defect = 0.0;     // max |f0 + g + h - f| / max |f|
    double identity_defect = 0.0;  // telescoping product identity on U_j
    double u_min = 0.0, u_max = 0.0, g_min = 0.0, g_max = 0.0;
    double ladder_u_lo = 0.0, ladder_u_hi = 0.0, ladder_g_lo = 0.0, ladder_g_hi = 0.0;
};

// noise_floor: nodes with w_j below noise_floor * max w_j are left out of the anisotropy statistics
DerivativeReport derivative_report(const KernelBank& bank, const BBTrace& t, double noise_floor = 1e-3);

}  // namespace hg
