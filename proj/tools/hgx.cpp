#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "hgroup/dbarb.hpp"
#include "hgroup/harness.hpp"

using namespace hg;

namespace {

void print_checks(const Report& r) {
    for (const auto& c : r.checks) {
        const char* tag = c.pass ? "PASS" : (c.hard ? "FAIL" : "WARN");
        std::printf("%-4s %-34s %-14.6g %-6s %-10.4g %s\n", tag, c.id.c_str(), c.measured, c.relation.c_str(),
                    c.threshold, check_anchor(c.id).c_str());
    }
    for (const auto& [k, v] : r.timings) std::printf("time %-8s %.2fs\n", k.c_str(), v);
    if (!r.error.empty()) std::fprintf(stderr, "error: %s\n", r.error.c_str());
}

// direct operator runs on a sample form of H^n
int run_dbarb_op(const std::string& op, int n, int q, int N, const std::string& corrector, int iters, bool json) {
    auto G = heisenberg(n);
    std::vector<int> dims(2 * n + 1, N);
    std::vector<double> ext(2 * n + 1, 3.0);
    ext.back() = 4.0;
    GridSpec s(dims, ext);
    auto sample = [&](int deg, double shift) {
        FormField u(n, deg, s);
        int i = 0;
        for (auto& [a, c] : u.coef) {
            double cx = 0.2 * i + shift;
            auto env = [&, cx](const double* p) {
                double r2 = (p[0] - cx) * (p[0] - cx);
                for (int k = 1; k < 2 * n; ++k) r2 += p[k] * p[k];
                return std::exp(-r2 - p[2 * n] * p[2 * n] / 2);
            };
            c = CField(GridFunction::sample(s, [&](const double* p) { return env(p) * (1 + 0.3 * p[0]); }),
                       GridFunction::sample(s, [&](const double* p) { return env(p) * 0.5 * p[1]; }));
            ++i;
        }
        return u;
    };
    Json out;
    out["op"] = op;
    out["n"] = n;
    out["q"] = q;
    out["N"] = N;
    if (op == "apply") {
        auto u = sample(q, 0.0);
        auto v = dbar_b(G, u);
        out["input_norm"] = u.norm(2);
        out["output_norm"] = v.norm(2);
        out["square_norm"] = q + 2 <= n ? dbar_b(G, v).norm(2) : 0.0;
    } else if (op == "apply-star") {
        auto u = sample(q, 0.0);
        auto v = dbar_b_star(G, u);
        out["input_norm"] = u.norm(2);
        out["output_norm"] = v.norm(2);
    } else if (op == "solve") {
        auto beta = sample(q + 1, 0.0);
        auto f = dbar_b_star(G, beta);
        SolveParams p;
        p.max_iter = iters;
        p.abort_on_violation = false;
        Corrector c = corrector == "ls" ? least_squares_corrector(G, LSParams{}) : synthetic_corrector(beta);
        if (corrector != "ls" && corrector != "synthetic")
            throw Error(ErrorCode::ConfigError, "--op solve supports the synthetic and ls correctors; bb runs through the suite");
        auto st = iterative_solve(G, f, c, p);
        Json steps = Json::array();
        for (const auto& k : st.steps) steps.push_back({{"residual", k.residual / st.f_norm}, {"ratio", k.ratio}, {"A", k.A}});
        out["steps"] = steps;
        out["A_max"] = st.A_max;
        out["Y"] = st.y_sup + st.y_grad;
        out["contract_broken"] = st.contract_broken;
        out["note"] = st.note;
    } else if (op == "duality") {
        if (q < 1 || q + 1 > n) throw Error(ErrorCode::DegreeError, "duality needs 1 <= q <= n - 1");
        auto u = sample(q, 0.1), al = sample(q + 1, 0.2), be = sample(q - 1, 0.3);
        auto phi = dbar_b_star(G, al) + dbar_b(G, be);
        auto r = duality_check(G, u, phi, &al, &be);
        out["identity_residual"] = r.identity_residual;
        out["holder_bound"] = r.holder_bound;
        out["pairing"] = std::abs(r.lhs);
        out["holder_ok"] = r.holder_ok;
    } else {
        throw Error(ErrorCode::ConfigError, "unknown --op " + op);
    }
    if (json) std::cout << out.dump(2) << "\n";
    else for (const auto& [k, v] : out.items()) std::cout << k << " = " << v.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic analysis checks on stratified groups"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, out_path;
    unsigned long long seed = 0;
    int grid = 0;
    bool json = false;
    app.add_option("--config", config_path, "config file (key = value lines with [sections])");
    app.add_option("--seed", seed, "random seed, overrides [run] seed");
    app.add_option("--out", out_path, "write the JSON report here");
    app.add_option("--grid", grid, "points per axis, overrides [grid] N");
    app.add_flag("--json", json, "print the JSON report to stdout");

    struct Sub {
        const char* name;
        const char* suite;
        const char* help;
    };
    const Sub subs[] = {{"verify-group", "group", "group law, dilations, norm estimates"},
                        {"calculus", "calculus", "convolution, invariant derivatives, mean-value ratios"},
                        {"lp", "lp", "Littlewood-Paley pieces, splitting, Bernstein ratios"},
                        {"bb-approx", "bb", "bounded approximation of a two-scale function"},
                        {"dbarb", "dbarb", "tangential Cauchy-Riemann complex and the correction solver"},
                        {"all", "", "every suite"}};
    std::map<std::string, CLI::App*> cmd;
    for (const auto& s : subs) cmd[s.name] = app.add_subcommand(s.name, s.help);

    std::string op, corrector;
    int n = 0, q = -1;
    auto* db = cmd["dbarb"];
    db->add_option("--op", op, "apply | apply-star | solve | duality (omit to run the suite)")
        ->check(CLI::IsMember({"apply", "apply-star", "solve", "duality"}));
    db->add_option("--n", n, "n of H^n");
    db->add_option("--q", q, "form degree");
    db->add_option("--corrector", corrector, "synthetic | ls | bb")->check(CLI::IsMember({"synthetic", "ls", "bb"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig() : ExperimentConfig::load(config_path);
        if (app.count("--seed")) c.seed = seed;
        if (app.count("--grid")) c.N = grid;
        if (!out_path.empty()) c.out = out_path;
        if (n > 0) c.n = n;
        if (!corrector.empty()) c.corrector = corrector;
        for (const auto& s : subs)
            if (cmd[s.name]->parsed() && *s.suite) c.suites = {s.suite};
        c.validate();

        if (db->parsed() && !op.empty())
            return run_dbarb_op(op, c.n, q < 0 ? (op == "duality" ? 1 : 0) : q, c.dbarb_N, c.corrector, c.iters, json);

        Report r = run_suite(c);
        if (json) std::cout << r.to_json().dump(2) << "\n";
        else print_checks(r);
        if (!c.out.empty()) {
            std::ofstream o(c.out);
            if (!o) throw Error(ErrorCode::IoError, "cannot write " + c.out);
            o << r.to_json().dump(2) << "\n";
        }
        if (!c.csv.empty()) write_series(r, c.csv);
        return r.exit_code();
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
