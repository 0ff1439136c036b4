#include <cmath>
#include <fstream>
#include <set>

#include "doctest.h"
#include "hgroup/harness.hpp"
#include "hgroup/lp.hpp"

using namespace hg;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.samples = 200;
    c.pair_samples = 200;
    c.N = 17;
    c.conv_N = 9;
    c.order_N = 9;
    c.mean_samples = 50;
    c.ball_samples = 8;
    c.j_min = -2;
    c.j_max = 2;
    c.J = 2;
    c.refine = true;
    c.line_N = 513;
    c.line_L = 20.0;
    c.dbarb_N = 5;
    c.dbarb_refine_N = 7;
    c.iters = 3;
    c.corrector = "ls";
    return c;
}

std::string error_of(const std::string& text) {
    try {
        ExperimentConfig::parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config text round trip") {
    ExperimentConfig c;
    std::string t = c.to_text();
    CHECK(ExperimentConfig::parse(t).to_text() == t);

    // non-canonical input: comments, spacing, partial sections
    auto d = ExperimentConfig::parse("# comment\n[grid]\n  N=65   # finer\nL = 0.1\n\n[run]\nsuites = group lp\nseed=7\n");
    CHECK(d.N == 65);
    CHECK(d.L == 0.1);
    CHECK(d.seed == 7);
    CHECK(d.suites == std::vector<std::string>{"group", "lp"});
    CHECK(ExperimentConfig::parse(d.to_text()).to_text() == d.to_text());
    CHECK(d.to_text().find("L = 0.1\n") != std::string::npos);
    CHECK(ExperimentConfig::parse(c.to_text()).two_envelope == c.two_envelope);

    auto e = ExperimentConfig::parse("[run]\nsuites =\n");
    CHECK(e.suites.empty());
}

TEST_CASE("config errors carry line numbers") {
    CHECK(error_of("[grid]\nN = 17\nwidth = 2\n").find("line 3") != std::string::npos);
    CHECK(error_of("[grid]\nN = 17\nwidth = 2\n").find("ConfigError") != std::string::npos);
    CHECK(error_of("[nosuch]\n").find("line 1") != std::string::npos);
    CHECK(error_of("N = 3\n").find("outside a section") != std::string::npos);
    CHECK(error_of("[grid]\nN = abc\n").find("line 2") != std::string::npos);
    CHECK(error_of("[grid]\nN = 17\n\nN = 19\n").find("line 4") != std::string::npos);
    CHECK(error_of("[grid]\nN\n").find("line 2") != std::string::npos);
    CHECK(error_of("[lp]\nrefine = yes\n").find("line 2") != std::string::npos);
    CHECK(error_of("[grid]\nN = 16\n").find("odd") != std::string::npos);
    CHECK(error_of("[run]\nsuites = group nosuch\n").find("unknown suite") != std::string::npos);
    CHECK(error_of("[dbarb]\ncorrector = magic\n").find("corrector") != std::string::npos);
    CHECK_THROWS_WITH_AS(ExperimentConfig::load("/nonexistent/cfg"), doctest::Contains("IoError"), Error);
}

TEST_CASE("test function library") {
    auto H = heisenberg(1);
    auto s = GridSpec(std::vector<int>{9, 9, 9}, std::vector<double>{2, 2, 3});
    CHECK(make_test_function("zero", H, s).is_zero());

    TestFunctionParams p;
    p.center = {0.25, -0.5, 0.5};
    p.width = 0.8;
    auto b = make_test_function("bump", H, s, p);
    auto x1 = make_test_function("band", H, s, p);
    double worst = 0.0, worst_x1 = 0.0;
    for (size_t i = 0; i < s.size(); ++i) {
        double x[3];
        s.node(i, x);
        double u = x[0] - 0.25, v = x[1] + 0.5, t = x[2] - 0.5, w2 = 0.64, w4 = 0.64 * 0.64;
        double g = std::exp(-u * u / w2 - v * v / w2 - t * t / w4);
        worst = std::max(worst, std::abs(b[i] - g));
        // X_1 = d/dx + 2 y d/dt
        double want = (-2 * u / w2 + 2 * x[1] * (-2 * t / w4)) * g;
        worst_x1 = std::max(worst_x1, std::abs(x1[i] - want));
    }
    CHECK(worst <= 1e-15);
    CHECK(worst_x1 <= 1e-14);

    TestFunctionParams r1, r2;
    r2.seed = 2;
    auto a = make_test_function("random", H, s, r1);
    CHECK(l2_rel(a, make_test_function("random", H, s, r1)) == 0.0);
    CHECK(l2_rel(a, make_test_function("random", H, s, r2)) > 0.01);

    TestFunctionParams one;
    one.j1 = one.j2 = 0;
    one.envelope = 1.0;
    auto ts = make_test_function("two-scale", H, s, one);
    double x0[3] = {0.5, 0.0, 0.0};
    // xi = 2, envelope width 1 / sqrt 2
    CHECK(ts.at(x0) == doctest::Approx(std::exp(-0.5) * std::cos(2 * M_PI)).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(make_test_function("nosuch", H, s), doctest::Contains("UnknownKind"), Error);
    CHECK_THROWS_AS(make_test_function("bump", heisenberg(2), s), Error);
}

TEST_CASE("two-scale energy sits in its two LP bands on the line") {
    auto A = abelian(1);
    auto s = GridSpec(std::vector<int>{4097}, std::vector<double>{40.0});
    KernelBank bank(A, s, BankParams{-4, 5});
    TestFunctionParams p;
    p.j1 = -1;
    p.j2 = 2;
    p.envelope = 2.0;
    auto f = make_test_function("two-scale", A, s, p);
    auto d = lp_decompose(bank, f, -4, 5);
    double all = 0.0, in = 0.0;
    for (const auto& [j, piece] : d.pieces) {
        double e = 0.0;
        for (double v : piece.values()) e += v * v;
        all += e;
        if (j == -1 || j == 2) in += e;
    }
    MESSAGE("concentration " << in / all);
    CHECK(in / all >= 0.9);
}

TEST_CASE("empty suite list") {
    ExperimentConfig c;
    c.suites.clear();
    auto r = run_suite(c);
    CHECK(r.checks.empty());
    CHECK(r.exit_code() == 0);
    CHECK(r.payload()["summary"]["checks"] == 0);
}

TEST_CASE("group suite on the default Heisenberg config") {
    ExperimentConfig c;
    c.suites = {"group"};
    c.samples = 2000;
    c.pair_samples = 2000;
    auto r = run_suite(c);
    CHECK(r.exit_code() == 0);
    for (const auto& ch : r.checks) {
        INFO(ch.id);
        CHECK(ch.pass);
    }
}

TEST_CASE("broken Jacobi identity in a descriptor") {
    ExperimentConfig c;
    c.suites = {"group"};
    c.descriptor = HG_TEST_DATA "/jacobi_broken.group";
    auto r = run_suite(c);
    CHECK(r.exit_code() == 2);
    CHECK(r.error.find("JacobiViolation") != std::string::npos);
    CHECK(r.payload()["error"].get<std::string>().find("JacobiViolation") != std::string::npos);
}

TEST_CASE("registry completeness and determinism") {
    auto c = small_config();
    auto r = run_suite(c);
    std::set<std::string> seen;
    for (const auto& ch : r.checks) {
        CHECK(check_registry().count(ch.id) == 1);
        CHECK(!check_anchor(ch.id).empty());
        seen.insert(ch.id);
    }
    for (const auto& [id, anchor] : check_registry()) {
        INFO(id);
        CHECK(seen.count(id) == 1);
        // anchors are labels, never bare numbers
        CHECK(anchor.find_first_of("0123456789") == std::string::npos);
    }
    CHECK_THROWS_WITH_AS(check_anchor("nosuch.check"), doctest::Contains("ConfigError"), Error);

    auto again = run_suite(c);
    CHECK(r.payload().dump() == again.payload().dump());
    CHECK(r.to_json().contains("timings"));
    CHECK(!r.payload().contains("timings"));

    c.seed = 99;
    c.suites = {"group"};
    auto other = run_suite(c);
    c.seed = 1;
    auto base = run_suite(c);
    CHECK(other.payload().dump() != base.payload().dump());
}
