#include "geoint/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "geoint/bpl.hpp"
#include "geoint/dirac.hpp"
#include "geoint/errors.hpp"
#include "geoint/hamiltonian.hpp"
#include "geoint/integrators.hpp"
#include "geoint/problems/double_pendulum.hpp"
#include "geoint/problems/duffing.hpp"
#include "geoint/problems/harmonic.hpp"
#include "geoint/problems/kdv.hpp"
#include "geoint/problems/nbody.hpp"
#include "geoint/problems/toda.hpp"

namespace geoint {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view v) {
    double x = 0.0;
    v = trim(v);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        fail(ErrorKind::validation, "bad number for " + std::string(key) + ": '" + std::string(v) + "'");
    return x;
}

int parse_int(std::string_view key, std::string_view v) {
    int x = 0;
    v = trim(v);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        fail(ErrorKind::validation, "bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
    return x;
}

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

const std::vector<std::string_view>& hamiltonian_integrators() {
    static const std::vector<std::string_view> ids{"euler", "ieuler", "sympeuler_a", "sympeuler_b",
                                                   "verlet", "rk4", "rk4sym"};
    return ids;
}

bool is_known_integrator(std::string_view id) {
    if (starts_with(id, "irk:")) return id.size() > 4;
    static const std::vector<std::string_view> other{"dirac1", "dirac2", "euler_constrained", "bpl", "rk4_adaptive"};
    const auto& ham = hamiltonian_integrators();
    return std::find(ham.begin(), ham.end(), id) != ham.end() || std::find(other.begin(), other.end(), id) != other.end();
}

bool is_known_problem(std::string_view id) {
    static const std::vector<std::string_view> ids{"toda",     "nbody",          "nbody_perturbed", "duffing1", "duffing2",
                                                   "duffing_forced", "kdv", "double_pendulum", "harmonic"};
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

// Everything a run needs to know about a problem: initial data for each
// integrator family it supports, column names and the invariant evaluator.
struct ProblemSetup {
    std::vector<std::string> state_names;
    std::vector<std::string> invariant_names;
    std::string error_name;
    std::function<Vector(double t, std::span<const double> state)> invariants;

    std::optional<HamiltonianSystem> hamiltonian;
    std::optional<TaylorGenerator> taylor;
    OdeField field;
    ComplexVector initial;  // for the ODE and BPL families
    bool complex_state = false;

    std::optional<ConstrainedSystem> constrained;
    DiracState dirac_initial;
};

std::vector<std::string> phase_names(std::size_t dof) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= dof; ++i) names.push_back("q" + std::to_string(i));
    for (std::size_t i = 1; i <= dof; ++i) names.push_back("p" + std::to_string(i));
    return names;
}

ComplexVector to_complex(std::span<const double> x) { return ComplexVector(x.begin(), x.end()); }

Vector flatten(const ComplexVector& z, bool complex_state) {
    Vector out;
    out.reserve(complex_state ? 2 * z.size() : z.size());
    for (const Complex& c : z) {
        out.push_back(c.real());
        if (complex_state) out.push_back(c.imag());
    }
    return out;
}

ComplexVector unflatten(std::span<const double> x, bool complex_state) {
    if (!complex_state) return to_complex(x);
    ComplexVector out(x.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(x[2 * i], x[2 * i + 1]);
    return out;
}

double relative(double value, double reference) {
    return reference == 0.0 ? std::abs(value) : std::abs(value / reference - 1.0);
}

void attach_hamiltonian(ProblemSetup& p, HamiltonianSystem sys, const PhaseState& u0) {
    p.state_names = phase_names(sys.dof);
    p.initial = to_complex(u0.values());
    p.taylor = sys.taylor;
    if (sys.taylor) {
        const auto f = sys.taylor->field;
        p.field = [f](std::span<const Complex> u, double t) { return f(u, t); };
    } else {
        p.field = [sys](std::span<const Complex> u, double) {
            Vector x(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i].real();
            return to_complex(sys.vector_field(x));
        };
    }
    p.hamiltonian = std::move(sys);
}

ProblemSetup setup_problem(const Scenario& s) {
    ProblemSetup p;
    const std::string& id = s.problem;
    if (id == "toda") {
        const PhaseState u0 = toda_initial();
        attach_hamiltonian(p, toda_system(3), u0);
        const double h0 = toda_hamiltonian(u0.values());
        p.invariant_names = {"H", "rel_H_err", "lax_1", "lax_2", "lax_3"};
        p.error_name = "rel_H_err";
        p.invariants = [h0](double, std::span<const double> u) {
            const double h = toda_hamiltonian(u);
            Vector out{h, relative(h, h0)};
            for (double l : lax_eigenvalues(u)) out.push_back(l);
            return out;
        };
    } else if (id == "nbody" || id == "nbody_perturbed") {
        const NBody nb = figure_eight_problem();
        const PhaseState u0 = id == "nbody" ? figure_eight_initial() : perturbed_initial();
        attach_hamiltonian(p, nb.system(), u0);
        p.state_names.clear();
        for (const char* prefix : {"", "p"})
            for (std::size_t k = 1; k <= nb.bodies(); ++k)
                for (const char* axis : {"x", "y"}) p.state_names.push_back(std::string(prefix) + axis + std::to_string(k));
        const double h0 = nb.hamiltonian(u0.values());
        const double l0 = nb.angular_momentum(u0.values());
        p.invariant_names = {"H", "rel_H_err", "L", "L_err"};
        p.error_name = "rel_H_err";
        p.invariants = [nb, h0, l0](double, std::span<const double> u) {
            const double h = nb.hamiltonian(u);
            const double l = nb.angular_momentum(u);
            return Vector{h, relative(h, h0), l, std::abs(l - l0)};
        };
    } else if (id == "harmonic") {
        const PhaseState u0(Vector{1.0, 0.0});
        attach_hamiltonian(p, harmonic_oscillator(), u0);
        p.state_names = {"q", "p"};
        p.invariant_names = {"H", "rel_H_err", "phase_err"};
        p.error_name = "rel_H_err";
        p.invariants = [u0](double t, std::span<const double> u) {
            const double h = 0.5 * (u[0] * u[0] + u[1] * u[1]);
            const PhaseState ex = harmonic_exact(u0, t);
            return Vector{h, relative(h, 0.5), std::hypot(u[0] - ex[0], u[1] - ex[1])};
        };
    } else if (id == "duffing2") {
        const PhaseState u0(Vector{1.0, 0.0});
        const DuffingProblem d = DuffingProblem::case2();
        attach_hamiltonian(p, d.hamiltonian_system(), u0);
        p.state_names = {"u", "v"};
        p.taylor = d.taylor();
        p.field = d.field();
        const double h0 = duffing_H2(u0.values());
        p.invariant_names = {"H2", "rel_H2_err"};
        p.error_name = "rel_H2_err";
        p.invariants = [h0](double, std::span<const double> u) {
            const double h = duffing_H2(u);
            return Vector{h, relative(h, h0)};
        };
    } else if (id == "duffing1" || id == "duffing_forced") {
        const DuffingProblem d = id == "duffing1" ? DuffingProblem::case1() : DuffingProblem::forced(s.forcing);
        p.state_names = {"u", "v"};
        p.taylor = d.taylor();
        p.field = d.field();
        p.initial = {1.0, 0.0};
        if (id == "duffing1") {
            const double i0 = duffing_I1(Vector{1.0, 0.0}, 0.0);
            p.invariant_names = {"I1", "rel_I1_err"};
            p.error_name = "rel_I1_err";
            p.invariants = [i0](double t, std::span<const double> u) {
                const double i = duffing_I1(u, t);
                return Vector{i, relative(i, i0)};
            };
        } else {
            p.invariants = [](double, std::span<const double>) { return Vector{}; };
        }
    } else if (id == "kdv") {
        KdvParams kp;
        kp.modes = s.modes;
        const KdvSpectral k(kp);
        p.complex_state = true;
        for (int m = -kp.modes; m <= kp.modes; ++m) {
            p.state_names.push_back("re(" + std::to_string(m) + ")");
            p.state_names.push_back("im(" + std::to_string(m) + ")");
        }
        p.taylor = k.taylor();
        p.field = k.field();
        p.initial = k.initial();
        p.invariant_names = {"l2_error", "mean"};
        p.error_name = "l2_error";
        p.invariants = [k](double t, std::span<const double> x) {
            const ComplexVector u = unflatten(x, true);
            return Vector{k.l2_error(u, t), u[static_cast<std::size_t>(k.modes())].real()};
        };
    } else if (id == "double_pendulum") {
        const DoublePendulum dp;
        const ConstrainedSystem sys = dp.system();
        p.dirac_initial = double_pendulum_initial(dp);
        p.state_names = {"x1", "y1", "x2", "y2", "px1", "py1", "px2", "py2"};
        const double e0 = sys.energy(p.dirac_initial.q, p.dirac_initial.p);
        p.invariant_names = {"energy", "energy_err", "constraint_residual"};
        p.error_name = "constraint_residual";
        p.invariants = [sys, e0](double, std::span<const double> x) {
            DiracState st;
            st.q.assign(x.begin(), x.begin() + 4);
            st.p.assign(x.begin() + 4, x.end());
            const double e = sys.energy(st.q, st.p);
            return Vector{e, std::abs(e - e0), constraint_residual(sys, st)};
        };
        p.constrained = sys;
    }
    return p;
}

class Recorder {
public:
    Recorder(RunRecord& rec, const ProblemSetup& p, int stride)
        : rec_(rec), p_(p), stride_(static_cast<std::size_t>(stride)), start_(std::chrono::steady_clock::now()) {}

    void initial(double t, Vector state) { push(t, std::move(state), 0.0); }

    void step(double t, const Vector& state, double h, bool last) {
        ++rec_.steps;
        if (last || rec_.steps % stride_ == 0) push(t, state, h);
    }

private:
    void push(double t, Vector state, double h) {
        Sample s;
        s.t = t;
        s.invariants = p_.invariants(t, state);
        s.state = std::move(state);
        s.step = h;
        s.cpu_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_).count();
        rec_.rows.push_back(std::move(s));
    }

    RunRecord& rec_;
    const ProblemSetup& p_;
    std::size_t stride_;
    std::chrono::steady_clock::time_point start_;
};

// Fixed-step loop; the last step is shortened to land on t_final.
template <class Advance, class Flatten>
void fixed_steps(const Scenario& s, Recorder& rec, Advance advance, Flatten flatten_state) {
    const double dt = *s.dt;
    const auto n = static_cast<std::size_t>(std::ceil(s.t_final / dt - 1e-9));
    double t = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const bool last = k + 1 == n;
        const double t_next = last ? s.t_final : static_cast<double>(k + 1) * dt;
        const double h = t_next - t;
        advance(t, h);
        t = t_next;
        rec.step(t, flatten_state(), h, last);
    }
}

void run_hamiltonian(const Scenario& s, const ProblemSetup& p, Recorder& rec) {
    const HamiltonianSystem& sys = *p.hamiltonian;
    Vector x0(p.initial.size());
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = p.initial[i].real();
    PhaseState u(x0);

    std::function<PhaseState(const PhaseState&, double)> step;
    const std::string& id = s.integrator;
    if (id == "euler") {
        step = [&](const PhaseState& v, double h) { return explicit_euler_step(sys, v, h); };
    } else if (id == "ieuler") {
        step = [&](const PhaseState& v, double h) { return implicit_euler_step(sys, v, h).state; };
    } else if (id == "sympeuler_a" || id == "sympeuler_b") {
        const EulerVariant var = id == "sympeuler_a" ? EulerVariant::a : EulerVariant::b;
        step = [&, var](const PhaseState& v, double h) { return symplectic_euler_step(sys, v, h, var).state; };
    } else if (id == "verlet") {
        step = [&](const PhaseState& v, double h) { return stormer_verlet_step(sys, v, h).state; };
    } else if (id == "rk4") {
        step = [&](const PhaseState& v, double h) { return rk4_step(sys, v, h); };
    } else {
        const ButcherTableau tab = id == "rk4sym" ? rk4sym_tableau() : load_tableau(id.substr(4));
        step = [&, tab](const PhaseState& v, double h) { return irk_step(sys, v, h, tab).state; };
    }
    fixed_steps(s, rec, [&](double, double h) { u = step(u, h); }, [&] { return u.values(); });
}

void run_ode_fixed(const Scenario& s, const ProblemSetup& p, Recorder& rec) {
    ComplexVector u = p.initial;
    const bool euler = s.integrator == "euler";
    fixed_steps(
        s, rec,
        [&](double t, double h) {
            if (euler) {
                const ComplexVector f = p.field(u, t);
                for (std::size_t i = 0; i < u.size(); ++i) u[i] += h * f[i];
            } else {
                u = rk4_ode_step(p.field, u, t, h);
            }
        },
        [&] { return flatten(u, p.complex_state); });
}

void run_dirac(const Scenario& s, const ProblemSetup& p, Recorder& rec) {
    const ConstrainedSystem& sys = *p.constrained;
    DiracState st = p.dirac_initial;
    const std::string& id = s.integrator;
    bool first = true;
    fixed_steps(
        s, rec,
        [&](double, double h) {
            if (id == "euler_constrained")
                st = euler_constrained_control(sys, st, h);
            else if (id == "dirac1" || first)
                st = dirac1_step(sys, st, h);
            else
                st = dirac2_step(sys, st, h);
            first = false;
        },
        [&] {
            Vector x = st.q;
            x.insert(x.end(), st.p.begin(), st.p.end());
            return x;
        });
}

void run_bpl(const Scenario& s, const ProblemSetup& p, Recorder& rec) {
    BplConfig cfg;
    cfg.order = s.order;
    cfg.pade_num = s.pade_num;
    cfg.pade_den = s.pade_den;
    cfg.quad_nodes = s.quad_nodes;
    cfg.eps_res = *s.eps_res;
    bpl_integrate(*p.taylor, p.initial, 0.0, s.t_final, cfg, false,
                  [&](double t, const ComplexVector& u, double h, double) {
                      rec.step(t, flatten(u, p.complex_state), h, t >= s.t_final);
                  });
}

void run_adaptive(const Scenario& s, const ProblemSetup& p, Recorder& rec) {
    AdaptiveRk4Options opts;
    opts.tolerance = *s.eps_res;
    adaptive_rk4(p.field, p.initial, 0.0, s.t_final, opts, false, [&](double t, const ComplexVector& u, double h) {
        rec.step(t, flatten(u, p.complex_state), h, t >= s.t_final);
    });
}

void check_compatible(const Scenario& s, const ProblemSetup& p) {
    const std::string& id = s.integrator;
    bool ok = false;
    if (id == "bpl")
        ok = p.taylor.has_value();
    else if (id == "rk4_adaptive")
        ok = static_cast<bool>(p.field);
    else if (id == "dirac1" || id == "dirac2" || id == "euler_constrained")
        ok = p.constrained.has_value();
    else if (p.hamiltonian)
        ok = true;
    else if (id == "rk4" || id == "euler")
        ok = static_cast<bool>(p.field);
    if (!ok) fail(ErrorKind::validation, "integrator " + id + " does not apply to problem " + s.problem);
}

}  // namespace

bool Scenario::tolerance_driven() const { return integrator == "bpl" || integrator == "rk4_adaptive"; }

void Scenario::validate() const {
    if (!is_known_problem(problem)) fail(ErrorKind::validation, "unknown problem '" + problem + "'");
    if (!is_known_integrator(integrator)) fail(ErrorKind::validation, "unknown integrator '" + integrator + "'");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) fail(ErrorKind::validation, "t_final must be positive");
    if (tolerance_driven()) {
        if (dt) fail(ErrorKind::validation, integrator + " takes eps_res, not dt");
        if (!eps_res || !(*eps_res >= 0.0)) fail(ErrorKind::validation, integrator + " needs eps_res >= 0");
    } else {
        if (eps_res) fail(ErrorKind::validation, integrator + " takes dt, not eps_res");
        if (!dt || !(*dt > 0.0) || !std::isfinite(*dt)) fail(ErrorKind::validation, integrator + " needs dt > 0");
    }
    if (stride < 1) fail(ErrorKind::validation, "stride must be at least 1");
    if (modes < 1) fail(ErrorKind::validation, "modes must be at least 1");
    if (integrator == "bpl") {
        BplConfig cfg;
        cfg.order = order;
        cfg.pade_num = pade_num;
        cfg.pade_den = pade_den;
        cfg.quad_nodes = quad_nodes;
        cfg.eps_res = *eps_res;
        cfg.validate();
    }
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "problem")
        s.problem = std::string(value);
    else if (key == "integrator")
        s.integrator = std::string(value);
    else if (key == "dt")
        s.dt = parse_double(key, value);
    else if (key == "eps_res")
        s.eps_res = parse_double(key, value);
    else if (key == "t_final")
        s.t_final = parse_double(key, value);
    else if (key == "out")
        s.out = std::string(value);
    else if (key == "order")
        s.order = parse_int(key, value);
    else if (key == "pade_num")
        s.pade_num = parse_int(key, value);
    else if (key == "pade_den")
        s.pade_den = parse_int(key, value);
    else if (key == "quad_nodes")
        s.quad_nodes = parse_int(key, value);
    else if (key == "stride")
        s.stride = parse_int(key, value);
    else if (key == "modes")
        s.modes = parse_int(key, value);
    else if (key == "forcing")
        s.forcing = parse_double(key, value);
    else
        fail(ErrorKind::validation, "unknown key '" + std::string(key) + "'");
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorKind::validation, "line " + std::to_string(line_no) + ": expected key=value");
        apply_setting(s, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_failure, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

Vector RunRecord::error_series() const {
    Vector out;
    const auto it = std::find(invariant_names.begin(), invariant_names.end(), error_name);
    if (error_name.empty() || it == invariant_names.end()) return Vector(rows.size(), 0.0);
    const auto col = static_cast<std::size_t>(it - invariant_names.begin());
    out.reserve(rows.size());
    for (const Sample& r : rows) out.push_back(r.invariants[col]);
    return out;
}

RunSummary RunRecord::summary() const {
    RunSummary s;
    s.steps = steps;
    if (rows.empty()) return s;
    const double span = rows.back().t - rows.front().t;
    s.mean_step = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    const Vector err = error_series();
    double integral = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        s.max_error = std::max(s.max_error, std::abs(err[i]));
        if (i > 0) integral += 0.5 * (std::abs(err[i]) + std::abs(err[i - 1])) * (rows[i].t - rows[i - 1].t);
    }
    s.mean_error = span > 0.0 ? integral / span : std::abs(err.front());
    s.final_error = std::abs(err.back());
    s.cpu_ns = rows.back().cpu_ns;
    return s;
}

RunRecord run_scenario(const Scenario& s) {
    s.validate();
    const ProblemSetup p = setup_problem(s);
    check_compatible(s, p);

    RunRecord rec;
    rec.problem = s.problem;
    rec.integrator = s.integrator;
    rec.state_names = p.state_names;
    rec.invariant_names = p.invariant_names;
    rec.error_name = p.error_name;

    Recorder recorder(rec, p, s.stride);
    if (p.constrained) {
        Vector x = p.dirac_initial.q;
        x.insert(x.end(), p.dirac_initial.p.begin(), p.dirac_initial.p.end());
        recorder.initial(0.0, std::move(x));
    } else {
        recorder.initial(0.0, flatten(p.initial, p.complex_state));
    }

    try {
        const std::string& id = s.integrator;
        if (id == "bpl")
            run_bpl(s, p, recorder);
        else if (id == "rk4_adaptive")
            run_adaptive(s, p, recorder);
        else if (p.constrained)
            run_dirac(s, p, recorder);
        else if (p.hamiltonian)
            run_hamiltonian(s, p, recorder);
        else
            run_ode_fixed(s, p, recorder);
    } catch (const Error& e) {
        rec.complete = false;
        rec.failure = e.what();
        if (!s.out.empty()) write_csv(rec, s.out);
        throw;
    }
    if (!s.out.empty()) write_csv(rec, s.out);
    return rec;
}

void write_csv(const RunRecord& rec, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io_failure, "cannot write " + path.string());
    out << "# problem=" << rec.problem << '\n';
    out << "# integrator=" << rec.integrator << '\n';
    out << "# steps=" << rec.steps << '\n';
    out << "# state_columns=" << rec.state_names.size() << '\n';
    out << "# error=" << rec.error_name << '\n';
    out << "# status=" << (rec.complete ? "complete" : "failed: " + rec.failure) << '\n';
    out << 't';
    for (const auto& n : rec.state_names) out << ',' << n;
    for (const auto& n : rec.invariant_names) out << ',' << n;
    out << ",step,cpu_ns\n";
    for (const Sample& r : rec.rows) {
        out << format_number(r.t);
        for (double x : r.state) out << ',' << format_number(x);
        for (double x : r.invariants) out << ',' << format_number(x);
        out << ',' << format_number(r.step) << ',' << r.cpu_ns << '\n';
    }
    if (!out) fail(ErrorKind::io_failure, "write failed for " + path.string());
}

RunRecord read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io_failure, "cannot open " + path.string());
    RunRecord rec;
    std::size_t state_columns = 0;
    std::vector<std::string> header;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string_view body = trim(std::string_view(line).substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            const std::string_view key = body.substr(0, eq);
            const std::string value(body.substr(eq + 1));
            if (key == "problem")
                rec.problem = value;
            else if (key == "integrator")
                rec.integrator = value;
            else if (key == "steps")
                rec.steps = static_cast<std::size_t>(parse_double(key, value));
            else if (key == "state_columns")
                state_columns = static_cast<std::size_t>(parse_int(key, value));
            else if (key == "error")
                rec.error_name = value;
            else if (key == "status") {
                rec.complete = value == "complete";
                if (!rec.complete && starts_with(value, "failed: ")) rec.failure = value.substr(8);
            }
            continue;
        }
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (header.empty()) {
            for (auto c : cells) header.emplace_back(trim(c));
            if (header.size() < 3 + state_columns || header.front() != "t" || header.back() != "cpu_ns")
                fail(ErrorKind::io_failure, "unexpected CSV header in " + path.string());
            rec.state_names.assign(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(state_columns));
            rec.invariant_names.assign(header.begin() + 1 + static_cast<std::ptrdiff_t>(state_columns), header.end() - 2);
            continue;
        }
        if (cells.size() != header.size()) fail(ErrorKind::io_failure, "ragged CSV row in " + path.string());
        Sample s;
        s.t = parse_double("t", cells[0]);
        for (std::size_t i = 0; i < state_columns; ++i) s.state.push_back(parse_double("state", cells[1 + i]));
        for (std::size_t i = 1 + state_columns; i + 2 < cells.size(); ++i)
            s.invariants.push_back(parse_double("invariant", cells[i]));
        s.step = parse_double("step", cells[cells.size() - 2]);
        const std::string_view ns = trim(cells.back());
        std::from_chars(ns.data(), ns.data() + ns.size(), s.cpu_ns);
        rec.rows.push_back(std::move(s));
    }
    if (header.empty()) fail(ErrorKind::io_failure, "no CSV header in " + path.string());
    return rec;
}

std::vector<ComparisonRow> compare(std::span<const RunRecord> records) {
    if (records.size() < 2) fail(ErrorKind::validation, "compare needs at least two records");
    for (const RunRecord& r : records)
        if (r.problem != records.front().problem)
            fail(ErrorKind::mismatched_problem, r.problem + " vs " + records.front().problem);
    std::vector<ComparisonRow> rows;
    const RunSummary base = records.front().summary();
    auto ratio = [](double a, double b) { return b != 0.0 ? a / b : std::numeric_limits<double>::quiet_NaN(); };
    for (const RunRecord& r : records) {
        ComparisonRow row;
        row.label = r.integrator;
        row.summary = r.summary();
        row.step_ratio = ratio(row.summary.mean_step, base.mean_step);
        row.error_ratio = ratio(row.summary.mean_error, base.mean_error);
        row.cpu_ratio = ratio(static_cast<double>(row.summary.cpu_ns), static_cast<double>(base.cpu_ns));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_comparison(std::span<const ComparisonRow> rows) {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-16s %10s %12s %12s %12s %12s %12s %9s %9s %9s\n", "integrator", "steps",
                  "mean_step", "mean_error", "max_error", "final_error", "cpu_ms", "step_x", "error_x", "cpu_x");
    out += buf;
    for (const ComparisonRow& r : rows) {
        const RunSummary& s = r.summary;
        std::snprintf(buf, sizeof buf, "%-16s %10zu %12.4e %12.4e %12.4e %12.4e %12.3f %9.3g %9.3g %9.3g\n",
                      r.label.c_str(), s.steps, s.mean_step, s.mean_error, s.max_error, s.final_error,
                      static_cast<double>(s.cpu_ns) * 1e-6, r.step_ratio, r.error_ratio, r.cpu_ratio);
        out += buf;
    }
    return out;
}

std::filesystem::path emit_plot_scripts(const RunRecord& rec, const std::filesystem::path& csv_path) {
    if (rec.rows.empty()) fail(ErrorKind::io_failure, "record has no rows to plot");
    write_csv(rec, csv_path);
    std::filesystem::path script = csv_path;
    script.replace_extension(".gp");
    std::filesystem::path image = csv_path;
    image.replace_extension(".png");

    std::ofstream out(script);
    if (!out) fail(ErrorKind::io_failure, "cannot write " + script.string());
    const std::string data = csv_path.filename().string();
    out << "set datafile separator \",\"\n";
    out << "set terminal pngcairo size 900,700\n";
    out << "set output \"" << image.filename().string() << "\"\n";
    if (rec.problem == "duffing_forced") {
        out << "set xlabel \"u\"\nset ylabel \"v\"\nunset key\n";
        out << "plot \"" << data << "\" using (column(\"t\") >= 40 ? column(\"u\") : NaN):\"v\" with dots\n";
        return script;
    }
    out << "set multiplot layout 2,1\n";
    out << "set xlabel \"t\"\n";
    if (!rec.error_name.empty()) {
        out << "set ylabel \"" << rec.error_name << "\"\nset logscale y\nunset key\n";
        out << "plot \"" << data << "\" using \"t\":\"" << rec.error_name << "\" with lines\n";
        out << "unset logscale y\n";
    } else {
        out << "set ylabel \"" << rec.state_names.front() << "\"\nunset key\n";
        out << "plot \"" << data << "\" using \"t\":\"" << rec.state_names.front() << "\" with lines\n";
    }
    out << "set ylabel \"step\"\n";
    out << "plot \"" << data << "\" using \"t\":\"step\" with lines\n";
    out << "unset multiplot\n";
    if (!out) fail(ErrorKind::io_failure, "write failed for " + script.string());
    return script;
}

}  // namespace geoint
