#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "hgroup/grid.hpp"

namespace hg {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
    // [run]
    unsigned long long seed = 1;
    std::vector<std::string> suites = {"group", "calculus", "lp", "bb", "dbarb"};
    std::string out;  // report path, empty: none
    std::string csv;  // directory for CSV series, empty: none
    // [group]
    std::string group = "heisenberg1";
    std::string descriptor;  // group file; overrides the id when set
    long samples = 10000;
    long pair_samples = 100000;
    // [grid] first-layer axes span [-L, L], higher layers [-T, T]
    int N = 33;
    double L = 4.0;
    double T = 6.0;
    // [calculus]
    int conv_N = 17;   // fast vs naive convolution
    int order_N = 17;  // identity residuals on order_N and 2 order_N - 1
    long mean_samples = 10000;
    int ball_samples = 64;
    // [bank]
    int j_min = -4, j_max = 4;
    // [lp]
    double width = 0.8;
    int J = 4;
    double rec_tol = 0.02;
    bool refine = false;  // repeat the ratio checks on 2N - 1
    int line_N = 4097;
    double line_L = 40.0;
    double envelope = 2.0;
    int j1 = -1, j2 = 2;
    // [bb]
    double delta = 0.5;
    int bb_N = 2;
    int sigma = 3;
    int bb_j_min = -1, bb_j_max = 1;
    int R_override = 0;
    double c_G = 0.0;
    int two_j1 = -2, two_j2 = 0;
    double two_envelope = 1.4142135623730951;
    double f0_width = 0.8;
    int f0_j_min = -3, f0_j_max = 2;
    // [dbarb]
    int n = 2;
    int dbarb_N = 9;
    int dbarb_refine_N = 17;
    int iters = 10;
    std::string corrector = "synthetic";

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_text() const;
    void validate() const;
};

struct TestFunctionParams {
    std::vector<double> center;  // defaults to the origin
    double width = 1.0;
    int j1 = -1, j2 = 1;
    double envelope = 2.0;
    unsigned long long seed = 1;
};

// kinds: zero, bump, band, two-scale, random. Closed forms:
//   bump      exp(-sum_a ((x_a - c_a) / w^{layer a})^2)
//   band      X_1 of bump
//   two-scale sum_{j in {j1, j2}} 2^{-(j - j1)/2} env_j(x) cos(2 pi xi_j x_1), xi_j = 2^{j+1},
//             env_j = bump with width envelope / sqrt(xi_j)
//   random    six bumps with seeded centers in the inner half of the box, widths in [0.5, 1.5], weights in [-1, 1]
GridFunction make_test_function(const std::string& kind, const GradedGroup& G, const GridSpec& s,
                                const TestFunctionParams& p = {});

// check id -> descriptive anchor; "plumbing" for artifact-only checks
const std::map<std::string, std::string>& check_registry();
const std::string& check_anchor(const std::string& id);  // ConfigError for unknown ids

struct Check {
    std::string id;
    Json values = Json::object();
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<=", ">=", "<", "report"
    bool pass = true;
    bool hard = true;
};

struct Series {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Report {
    std::string config;  // canonical text
    std::vector<Check> checks;
    std::map<std::string, Series> series;
    std::map<std::string, double> timings;  // seconds per suite, kept out of the payload
    std::string error;  // set when the run stopped before the suites (bad group, ...)

    bool passed() const;
    int exit_code() const;  // 0 pass, 1 failed hard check, 2 configuration error
    Json payload() const;   // deterministic part
    Json to_json() const;   // payload plus timings
};

// zero-mean splitting on R^2 against direct Fourier sums of the same multiplier; max abs error
double abelian_splitting_error();

GridSpec grid_for(const GradedGroup& G, int N, double L, double T);
GradedGroup config_group(const ExperimentConfig& c);

// runs the selected suites in the canonical order group, calculus, lp, bb, dbarb
Report run_suite(const ExperimentConfig& c);
void write_series(const Report& r, const std::string& dir);

}  // namespace hg
