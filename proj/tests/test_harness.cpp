#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "geoint/errors.hpp"
#include "geoint/harness.hpp"

using namespace geoint;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "geoint_harness_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::validation;
}

Scenario toda(const std::string& integrator, double dt, double t_final) {
    Scenario s;
    s.problem = "toda";
    s.integrator = integrator;
    s.dt = dt;
    s.t_final = t_final;
    return s;
}

}  // namespace

TEST_CASE("scenario parsing") {
    const Scenario s = parse_scenario(
        "# comment\n"
        "problem = kdv\n"
        "integrator=bpl\n"
        "eps_res=1e-6   # trailing comment\n"
        "\n"
        "t_final=1.5\n"
        "order=12\n"
        "pade_num=5\n"
        "pade_den=6\n"
        "modes=16\n");
    CHECK(s.problem == "kdv");
    CHECK(s.integrator == "bpl");
    REQUIRE(s.eps_res);
    CHECK(*s.eps_res == 1e-6);
    CHECK(!s.dt);
    CHECK(s.t_final == 1.5);
    CHECK(s.order == 12);
    CHECK(s.modes == 16);
    CHECK(s.tolerance_driven());
    CHECK_NOTHROW(s.validate());

    CHECK(kind_of([] { (void)parse_scenario("colour=red\n"); }) == ErrorKind::validation);
    CHECK(kind_of([] { (void)parse_scenario("dt=fast\n"); }) == ErrorKind::validation);
    CHECK(kind_of([] { (void)parse_scenario("order=2.5\n"); }) == ErrorKind::validation);
    CHECK(kind_of([] { (void)parse_scenario("just words\n"); }) == ErrorKind::validation);
    CHECK(kind_of([] { (void)load_scenario(scratch() / "missing.cfg"); }) == ErrorKind::io_failure);
}

TEST_CASE("scenario validation") {
    Scenario s = toda("rk4sym", 0.01, 0.0);
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::validation);
    CHECK(kind_of([&] { (void)run_scenario(s); }) == ErrorKind::validation);
    s.t_final = 1.0;
    CHECK_NOTHROW(s.validate());
    s.eps_res = 1e-6;
    CHECK(kind_of([&] { s.validate(); }) == ErrorKind::validation);

    Scenario b = toda("bpl", 0.1, 1.0);
    CHECK(kind_of([&] { b.validate(); }) == ErrorKind::validation);
    b.problem = "nowhere";
    CHECK(kind_of([&] { b.validate(); }) == ErrorKind::validation);

    Scenario wrong = toda("dirac1", 0.01, 1.0);
    CHECK(kind_of([&] { (void)run_scenario(wrong); }) == ErrorKind::validation);
    wrong.problem = "duffing1";
    wrong.integrator = "verlet";
    CHECK(kind_of([&] { (void)run_scenario(wrong); }) == ErrorKind::validation);
}

TEST_CASE("Toda with RK4sym keeps the energy error below 1e-6") {
    Scenario s = toda("rk4sym", 0.01, 500.0);
    s.stride = 10;
    const RunRecord rec = run_scenario(s);
    CHECK(rec.complete);
    CHECK(rec.steps == 50000);
    CHECK(rec.error_name == "rel_H_err");
    CHECK(rec.rows.back().t == 500.0);
    CHECK(rec.summary().max_error <= 1e-6);
}

TEST_CASE("Toda with symplectic Euler stays below 2.42 dt") {
    for (const char* id : {"sympeuler_a", "sympeuler_b"}) {
        const RunRecord rec = run_scenario(toda(id, 0.1, 1000.0));
        CHECK(rec.summary().max_error <= 2.42 * 0.1);
    }
}

TEST_CASE("CSV round trip and determinism") {
    Scenario s = toda("rk4", 0.05, 10.0);
    s.stride = 3;
    const fs::path path = scratch() / "roundtrip.csv";
    s.out = path.string();
    const RunRecord rec = run_scenario(s);
    const RunRecord back = read_csv(path);
    CHECK(back.problem == "toda");
    CHECK(back.integrator == "rk4");
    CHECK(back.steps == rec.steps);
    CHECK(back.complete);
    CHECK(back.state_names == rec.state_names);
    CHECK(back.invariant_names == rec.invariant_names);
    REQUIRE(back.rows.size() == rec.rows.size());
    const RunSummary a = rec.summary();
    const RunSummary b = back.summary();
    CHECK(a.steps == b.steps);
    CHECK(a.mean_step == b.mean_step);
    CHECK(a.max_error == b.max_error);
    CHECK(a.mean_error == b.mean_error);
    CHECK(a.final_error == b.final_error);
    CHECK(a.cpu_ns == b.cpu_ns);

    const RunRecord again = run_scenario(s);
    REQUIRE(again.rows.size() == rec.rows.size());
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
        CHECK(again.rows[i].t == rec.rows[i].t);
        CHECK(again.rows[i].state == rec.rows[i].state);
        CHECK(again.rows[i].invariants == rec.rows[i].invariants);
        CHECK(again.rows[i].step == rec.rows[i].step);
    }
}

TEST_CASE("mean error does not depend much on the recording stride") {
    Scenario s = toda("rk4sym", 0.1, 100.0);
    const double full = run_scenario(s).summary().mean_error;
    s.stride = 2;
    const double half = run_scenario(s).summary().mean_error;
    CHECK(std::abs(full - half) <= 0.05 * full);
}

TEST_CASE("comparison tables") {
    Scenario bpl;
    bpl.problem = "toda";
    bpl.integrator = "bpl";
    bpl.eps_res = 1e-4;
    bpl.t_final = 100.0;
    const RunRecord rb = run_scenario(bpl);
    const double mean_step = rb.summary().mean_step;
    CHECK(mean_step == doctest::Approx(0.1).epsilon(0.5));
    const RunRecord rs = run_scenario(toda("rk4sym", mean_step, 100.0));

    const std::vector<RunRecord> recs{rb, rs};
    const std::vector<ComparisonRow> rows = compare(recs);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].step_ratio == 1.0);
    CHECK(rows[1].step_ratio == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rows[0].summary.mean_error < rows[1].summary.mean_error);
    CHECK(rows[1].error_ratio > 1.0);
    const std::string table = format_comparison(rows);
    CHECK(table.find("bpl") != std::string::npos);
    CHECK(table.find("rk4sym") != std::string::npos);

    const std::vector<RunRecord> single{rb};
    CHECK(kind_of([&] { (void)compare(single); }) == ErrorKind::validation);
    Scenario h;
    h.problem = "harmonic";
    h.integrator = "verlet";
    h.dt = 0.1;
    h.t_final = 1.0;
    const std::vector<RunRecord> mixed{rb, run_scenario(h)};
    CHECK(kind_of([&] { (void)compare(mixed); }) == ErrorKind::mismatched_problem);
}

TEST_CASE("every problem runs with a matching integrator") {
    struct Case {
        const char* problem;
        const char* integrator;
        double step;
        double t_final;
        const char* error_column;
    };
    const Case cases[] = {
        {"harmonic", "verlet", 0.05, 2.0, "rel_H_err"},
        {"nbody", "rk4sym", 0.01, 0.5, "rel_H_err"},
        {"nbody_perturbed", "verlet", 0.01, 0.5, "rel_H_err"},
        {"duffing1", "bpl", 1e-4, 1.0, "rel_I1_err"},
        {"duffing2", "rk4", 0.01, 1.0, "rel_H2_err"},
        {"duffing_forced", "rk4_adaptive", 1e-8, 1.0, ""},
        {"kdv", "rk4", 1e-3, 0.05, "l2_error"},
        {"double_pendulum", "dirac2", 1e-3, 0.2, "constraint_residual"},
        {"double_pendulum", "euler_constrained", 1e-3, 0.2, "constraint_residual"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.problem);
        CAPTURE(c.integrator);
        Scenario s;
        s.problem = c.problem;
        s.integrator = c.integrator;
        if (s.tolerance_driven())
            s.eps_res = c.step;
        else
            s.dt = c.step;
        s.t_final = c.t_final;
        s.modes = 8;
        const RunRecord rec = run_scenario(s);
        CHECK(rec.complete);
        CHECK(rec.error_name == std::string(c.error_column));
        CHECK(rec.rows.back().t == doctest::Approx(c.t_final).epsilon(1e-12));
        for (const Sample& row : rec.rows) {
            CHECK(row.state.size() == rec.state_names.size());
            CHECK(row.invariants.size() == rec.invariant_names.size());
        }
    }
}

TEST_CASE("tableau files drive the implicit integrator") {
    const fs::path tab = scratch() / "midpoint.tab";
    std::ofstream(tab) << "1 2\n0.5\n1\n";
    Scenario s;
    s.problem = "harmonic";
    s.integrator = "irk:" + tab.string();
    s.dt = 0.1;
    s.t_final = 10.0;
    const RunRecord rec = run_scenario(s);
    const std::size_t h = static_cast<std::size_t>(
        std::find(rec.invariant_names.begin(), rec.invariant_names.end(), "rel_H_err") - rec.invariant_names.begin());
    REQUIRE(h < rec.invariant_names.size());
    for (const Sample& row : rec.rows) CHECK(row.invariants[h] <= 1e-12);
}

TEST_CASE("failed runs leave a marked partial record") {
    const fs::path path = scratch() / "collapse.csv";
    Scenario s;
    s.problem = "harmonic";
    s.integrator = "bpl";
    s.eps_res = 0.0;
    s.t_final = 1.0;
    s.out = path.string();
    CHECK(kind_of([&] { (void)run_scenario(s); }) == ErrorKind::step_collapse);
    const RunRecord back = read_csv(path);
    CHECK(!back.complete);
    CHECK(back.failure.find("StepCollapse") != std::string::npos);
    REQUIRE(!back.rows.empty());
    CHECK(back.rows.back().t < 1.0);
}

TEST_CASE("plot scripts") {
    const fs::path csv = scratch() / "toda_plot.csv";
    const RunRecord rec = run_scenario(toda("rk4sym", 0.1, 5.0));
    const fs::path script = emit_plot_scripts(rec, csv);
    CHECK(fs::exists(csv));
    CHECK(script.extension() == ".gp");
    const std::string text = slurp(script);
    CHECK(text.find("\"rel_H_err\"") != std::string::npos);
    CHECK(text.find("toda_plot.csv") != std::string::npos);

    Scenario d;
    d.problem = "duffing_forced";
    d.integrator = "rk4";
    d.dt = 0.05;
    d.t_final = 60.0;
    const fs::path phase = emit_plot_scripts(run_scenario(d), scratch() / "duffing.csv");
    const std::string ptext = slurp(phase);
    CHECK(ptext.find(">= 40") != std::string::npos);
    CHECK(ptext.find("\"v\"") != std::string::npos);

    RunRecord empty;
    empty.problem = "toda";
    CHECK(kind_of([&] { (void)emit_plot_scripts(empty, scratch() / "empty.csv"); }) == ErrorKind::io_failure);
}
