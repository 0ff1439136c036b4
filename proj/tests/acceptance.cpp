// Runs the ten acceptance criteria and prints one line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hgroup/harness.hpp"
#include "hgroup/lp.hpp"

using namespace hg;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const Check& find(const Report& r, const std::string& id) {
    for (const auto& c : r.checks)
        if (c.id == id) return c;
    throw Error(ErrorCode::InvalidArgument, "missing check " + id);
}

struct Outcome {
    bool pass = true;
    std::ostringstream msg;
    void need(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            msg << " [failed: " << what << "]";
        }
    }
};

ExperimentConfig only(const std::string& suite) {
    ExperimentConfig c;
    c.suites = {suite};
    return c;
}

}  // namespace

int main() {
    int failed = 0;
    auto run = [&](int no, const char* title, const std::function<void(Outcome&)>& body) {
        Outcome o;
        auto t0 = Clock::now();
        try {
            body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.msg << " [exception: " << e.what() << "]";
        }
        std::printf("criterion %2d %s: %s%s (%.1f s)\n", no, title, o.pass ? "PASS" : "FAIL", o.msg.str().c_str(), since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    };

    run(1, "group algebra", [](Outcome& o) {
        auto t0 = Clock::now();
        double worst = 0.0;
        for (const char* id : {"heisenberg1", "heisenberg2", "engel"}) {
            auto c = only("group");
            c.group = id;
            c.samples = 10000;
            c.pair_samples = 1;
            auto r = run_suite(c);
            for (const char* k : {"group.associativity", "group.dilation", "group.inverse", "group.first_layer_additivity"}) {
                const auto& ch = find(r, k);
                worst = std::max(worst, ch.measured);
                o.need(ch.pass, std::string(id) + " " + k);
            }
        }
        double t = since(t0);
        o.msg << " max error " << worst << ", " << t << " s";
        o.need(t < 5.0, "runtime");
    });

    run(2, "quasi-triangle and sigma-translation constants", [](Outcome& o) {
        auto t0 = Clock::now();
        for (const char* id : {"heisenberg1", "heisenberg2", "engel"}) {
            auto c = only("group");
            c.group = id;
            c.samples = 1;
            c.pair_samples = 100000;
            auto r = run_suite(c);
            const auto &q = find(r, "group.quasi_triangle"), &s = find(r, "group.sigma_translation");
            o.msg << " " << id << ": C " << q.measured << ", sigma spread " << s.measured << ";";
            o.need(q.pass && std::isfinite(q.measured), std::string(id) + " quasi-triangle");
            o.need(s.pass, std::string(id) + " sigma uniformity");
        }
        double t = since(t0);
        o.need(t < 10.0, "runtime");
    });

    run(3, "convolution oracle and derivative identities", [](Outcome& o) {
        auto c = only("calculus");
        c.conv_N = 17;
        c.order_N = 33;
        c.N = 17;
        c.mean_samples = 100;
        auto r = run_suite(c);
        const auto &a = find(r, "calculus.convolution_oracle"), &b = find(r, "calculus.derivative_identities"),
                   &w = find(r, "calculus.nonabelian_witness");
        o.msg << " fast vs naive " << a.measured << ", order " << b.measured << " (33^3 to 65^3), witness/floor "
              << w.measured;
        o.need(a.pass, "oracle");
        o.need(b.pass, "order");
        o.need(w.pass, "witness");
    });

    // LP on 65^3, reused by criterion 6
    auto H = heisenberg(1);
    ExperimentConfig d0;
    RatioReport bern65, der65;
    run(4, "Littlewood-Paley reconstruction on 65^3", [&](Outcome& o) {
        auto t0 = Clock::now();
        auto s = grid_for(H, 65, d0.L, d0.T);
        KernelBank bank(H, s, BankParams{-4, 4});
        TestFunctionParams tp;
        tp.width = d0.width;
        auto f = make_test_function("band", H, s, tp);
        auto d = lp_decompose(bank, f, -4, 4);
        double rec = l2_rel(lp_reconstruct(d), f);
        double tel = telescoping_check(bank, f, d).rel;
        auto m = moment_check(bank);
        double mom = std::max({m.mass, m.first, m.psi_mass, m.heat_mass, m.p_mass});
        bern65 = bernstein_check(bank, f, d);
        der65 = deriv_lp_check(bank, f, d, 2.0);
        double t = since(t0);
        o.msg << " reconstruction " << rec << ", telescoping " << tel << ", moments " << mom;
        o.need(rec <= 0.02, "reconstruction");
        o.need(tel <= 1e-10, "telescoping");
        o.need(mom <= 1e-10, "moments");
        o.need(t < 120.0, "runtime");
    });

    run(5, "zero-mean splitting", [&](Outcome& o) {
        auto s = GridSpec::cube(3, 33, 4.0);
        auto rho = GridFunction::sample(s, [](const double* x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
        auto r = decompose_zero_mean(H, xk_right(H, 1, rho), FieldSide::Right);
        double ab = abelian_splitting_error();
        o.msg << " right-invariant residual " << r.residual << ", abelian vs Fourier " << ab;
        o.need(r.residual <= 0.05, "residual");
        o.need(ab <= 1e-8, "abelian oracle");
    });

    run(6, "Bernstein and derivative square-function stability", [&](Outcome& o) {
        auto s = grid_for(H, 33, d0.L, d0.T);
        KernelBank bank(H, s, BankParams{-4, 4});
        TestFunctionParams tp;
        tp.width = d0.width;
        auto f = make_test_function("band", H, s, tp);
        auto d = lp_decompose(bank, f, -4, 4);
        auto b33 = bernstein_check(bank, f, d), d33 = deriv_lp_check(bank, f, d, 2.0);
        o.need(!bern65.ratios.empty() && !der65.ratios.empty(), "65^3 ratios missing");
        if (!o.pass) return;
        double vb = std::abs(bern65.sup - b33.sup) / b33.sup;
        double vd = std::abs(der65.ratios.back() - d33.ratios.back()) / d33.ratios.back();
        o.msg << " Bernstein " << b33.sup << " -> " << bern65.sup << ", derivative LP " << d33.ratios.back() << " -> "
              << der65.ratios.back() << " (33^3 -> 65^3)";
        o.need(std::isfinite(b33.sup) && std::isfinite(bern65.sup), "finite");
        o.need(vb < 0.5 && vd < 0.5, "variation");
    });

    Report bb;
    run(7, "bounded approximation structure on 65^3", [&](Outcome& o) {
        auto t0 = Clock::now();
        auto c = only("bb");
        c.N = 65;
        bb = run_suite(c);
        for (const char* id : {"bb.split", "bb.product_identity", "bb.U_range", "bb.G_range", "bb.g_tilde_constant",
                               "bb.selection", "bb.anisotropy_share", "bb.anisotropy_gain", "bb.f0_monotone"})
            o.need(find(bb, id).pass, id);
        o.msg << " split " << find(bb, "bb.split").measured << ", identity " << find(bb, "bb.product_identity").measured
              << ", selection " << find(bb, "bb.selection").measured << ", ordered share "
              << find(bb, "bb.anisotropy_share").measured << ", median gain " << find(bb, "bb.anisotropy_gain").measured
              << ", f0 ratios " << find(bb, "bb.f0_monotone").values["ratios"].dump();
        o.need(since(t0) < 600.0, "runtime");
    });

    run(8, "good direction", [&](Outcome& o) {
        const auto& g = find(bb, "bb.good_direction");
        o.msg << " |X_2(f-F)|_Q / |X_1(f-F)|_Q = " << g.measured << " " << g.values["norms"].dump();
        o.need(g.pass, "strict inequality");
    });

    run(9, "dbar_b complex and correction solver", [](Outcome& o) {
        auto r = run_suite(only("dbarb"));
        for (const char* id : {"dbarb.dbar_square", "dbarb.adjointness", "dbarb.synthetic_halving", "dbarb.accumulated_bound"})
            o.need(find(r, id).pass, id);
        o.msg << " dbar_b^2 " << find(r, "dbarb.dbar_square").measured << ", adjointness order "
              << find(r, "dbarb.adjointness").measured << ", halving deviation " << find(r, "dbarb.synthetic_halving").measured
              << ", Y - 2A|f| " << find(r, "dbarb.accumulated_bound").measured;
    });

    run(10, "determinism", [](Outcome& o) {
        ExperimentConfig c;
        auto a = run_suite(c).payload().dump(), b = run_suite(c).payload().dump();
        o.msg << " payload " << a.size() << " bytes";
        o.need(a == b, "payloads differ");
    });

    std::printf("%d of 10 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
