// micromorphic: command-line driver.
//
//   micromorphic <simulate|dispersion|statics|reduce|identities|params-check>
//       --config PATH [--seed N] [--out DIR] [--backend spectral|fd2] [--grid N] [--quiet]
//
// Exit status: 0 success, 1 inadmissible parameters or bad configuration,
// 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "micromorphic/micromorphic.hpp"

namespace fs = std::filesystem;
using namespace micromorphic;

namespace {

struct Flags {
    std::string config;
    std::optional<unsigned long> seed;
    std::string out = ".";
    std::optional<std::string> backend;
    std::optional<int> grid;
    bool quiet = false;
};

struct RunSettings {
    int grid = 16;
    Backend backend = Backend::spectral;
    unsigned long seed = 42;
    std::string dt = "auto";
    double dt_fraction = 0.5;
    long steps = 100;
    long stride = 1;
};

const std::set<std::string> kRunKeys{"grid", "backend", "seed", "dt", "dt_fraction", "steps", "stride"};

std::map<std::string, std::set<std::string>> allowed_sections() {
    std::set<std::string> top = material_keys();
    top.insert("material");
    return {
        {"", top},
        {"run", kRunKeys},
        {"simulate", {"initial", "amplitude", "velocity_amplitude", "forcing", "force_amplitude", "frequency", "snapshot"}},
        {"dispersion", {"direction", "k_min", "k_max", "samples", "limit"}},
        {"statics", {"problem", "tol", "amplitude", "jacobi", "max_iter"}},
        {"reduce", {"model", "a1", "a2", "a3", "mu", "d", "nu", "microstrain_form", "amplitude"}},
        {"identities", {}},
    };
}

RunSettings run_settings(const ConfigFile& c, const Flags& f) {
    RunSettings r;
    r.grid = int(c.integer("run", "grid", r.grid));
    r.backend = parse_backend(c.string("run", "backend", "spectral"));
    r.seed = (unsigned long)c.integer("run", "seed", long(r.seed));
    r.dt = c.string("run", "dt", r.dt);
    r.dt_fraction = c.number("run", "dt_fraction", r.dt_fraction);
    r.steps = c.integer("run", "steps", r.steps);
    r.stride = c.integer("run", "stride", r.stride);
    if (f.grid) r.grid = *f.grid;
    if (f.backend) r.backend = parse_backend(*f.backend);
    if (f.seed) r.seed = *f.seed;
    if (r.steps < 0) throw ConfigError("steps must be nonnegative, value " + std::to_string(r.steps));
    if (r.stride < 1) throw ConfigError("stride must be positive, value " + std::to_string(r.stride));
    return r;
}

/// dt policy: "auto" takes dt_fraction * dt_max.
double pick_dt(const RunSettings& r, double dt_max) {
    if (r.dt == "auto") return r.dt_fraction * dt_max;
    char* end = nullptr;
    const double v = std::strtod(r.dt.c_str(), &end);
    if (end == r.dt.c_str() || *end != '\0' || !(v > 0.0)) throw ConfigError("dt must be 'auto' or a positive number, got '" + r.dt + "'");
    return v;
}

class Output {
public:
    Output(const std::string& dir, bool quiet) : dir_(dir), quiet_(quiet) { fs::create_directories(dir_); }
    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
    std::ofstream open(const std::string& name) const {
        std::ofstream os(path(name));
        if (!os) throw Error("IoError", "cannot write " + path(name));
        return os;
    }
    void say(const std::string& s) const {
        if (!quiet_) std::cout << s;
    }

private:
    std::string dir_;
    bool quiet_;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x + 0.0);
    return buf;
}

void write_trace(const Output& out, const EnergyTrace& tr) {
    auto os = out.open("energy_trace.csv");
    os << "t,kinetic,elastic,micro,curvature,total\n";
    for (const auto& e : tr)
        os << num(e.t) << ',' << num(e.kinetic) << ',' << num(e.elastic) << ',' << num(e.micro) << ','
           << num(e.curvature) << ',' << num(e.total()) << '\n';
}

std::string trace_summary(const EnergyTrace& tr) {
    std::ostringstream os;
    os << "records " << tr.size() << ", E0 " << num(tr.front().total()) << ", E_end " << num(tr.back().total())
       << ", relative drift " << relative_energy_drift(tr) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------

int cmd_params_check(const ConfigFile& c, const Flags& f) {
    const MaterialParams p = material_of(c);
    const auto rep = check_admissible(p);
    Output out(f.out, f.quiet);
    const std::string text = "variant " + to_string(p.variant) + "\n" + rep.summary() +
                             (rep.ok() ? "admissible\n" : "inadmissible\n");
    out.open("params_check.txt") << text;
    if (!rep.ok()) {
        std::cout << text;
        for (const auto& i : rep.items)
            if (!i.passed) std::cerr << "error: InadmissibleParams: " << i.name << " violated, value " << i.value << "\n";
        return 1;
    }
    out.say(text);
    return 0;
}

int cmd_simulate(const ConfigFile& c, const Flags& f) {
    const MaterialParams p = material_of(c);
    require_admissible(p);
    const RunSettings r = run_settings(c, f);
    const Grid g(r.grid, r.backend);
    std::mt19937_64 rng(r.seed);
    const std::string init = c.string("simulate", "initial", "random");
    const double amp = c.number("simulate", "amplitude", 1.0);
    const double vamp = c.number("simulate", "velocity_amplitude", 0.0);
    State s = State::zero(g);
    if (init == "random") {
        s.u = random_band_limited<3>(g, rng, amp);
        s.P = random_band_limited<9>(g, rng, amp);
        if (vamp != 0.0) {
            s.udot = random_band_limited<3>(g, rng, vamp);
            s.Pdot = random_band_limited<9>(g, rng, vamp);
        }
    } else if (init == "plane_wave") {
        s.u = sample<3>(g, [&](const Vector3& x) { return Vector3{{0.0, amp * std::sin(x[0]), 0.0}}; });
    } else if (init != "zero") {
        throw ConfigError("[simulate] initial must be random, plane_wave or zero, got '" + init + "'");
    }
    const std::string forcing = c.string("simulate", "forcing", "none");
    Forcing F;
    if (forcing == "constant" || forcing == "harmonic") {
        const double fa = c.number("simulate", "force_amplitude", 1.0);
        VectorField f0 = random_band_limited<3>(g, rng, fa);
        TensorField M0 = random_band_limited<9>(g, rng, fa);
        if (forcing == "constant") F = Forcing::constant(std::move(f0), std::move(M0));
        else {
            const double w = c.number("simulate", "frequency", 1.0);
            F = Forcing::modulated(std::move(f0), std::move(M0), [w](double t) { return std::cos(w * t); });
        }
    } else if (forcing != "none") {
        throw ConfigError("[simulate] forcing must be none, constant or harmonic, got '" + forcing + "'");
    }
    const std::string snap = c.string("simulate", "snapshot", "none");
    if (snap != "none" && snap != "csv" && snap != "binary")
        throw ConfigError("[simulate] snapshot must be none, csv or binary, got '" + snap + "'");

    const double dt_max = estimate_stable_dt(p, g);
    const double dt = pick_dt(r, dt_max);
    Output out(f.out, f.quiet);
    const auto res = run(s, p, F, dt, std::size_t(r.steps), std::size_t(r.stride), dt_max);
    if (!res.state.u.all_finite() || !res.state.P.all_finite()) throw NonFiniteValue("state became non-finite");
    write_trace(out, res.trace);
    if (snap != "none") {
        const auto fmt = snap == "csv" ? SnapshotFormat::csv : SnapshotFormat::binary;
        const std::string ext = snap == "csv" ? ".csv" : ".bin";
        write_snapshot(out.path("u_final" + ext), res.state.u, fmt);
        write_snapshot(out.path("P_final" + ext), res.state.P, fmt);
    }
    std::ostringstream os;
    os << "simulate " << to_string(p.variant) << " n=" << g.n() << " backend=" << to_string(g.backend())
       << " dt=" << num(dt) << " dt_max=" << num(dt_max) << " steps=" << r.steps << "\n"
       << trace_summary(res.trace);
    if (F.active()) os << "forcing bound factor " << res.forcing_bound_factor << "\n";
    out.say(os.str());
    return 0;
}

int cmd_dispersion(const ConfigFile& c, const Flags& f) {
    const MaterialParams p = material_of(c);
    const Vector3 dir = c.vector3("dispersion", "direction", Vector3{{1, 0, 0}});
    const double k0 = c.number("dispersion", "k_min", 0.0), k1 = c.number("dispersion", "k_max", 8.0);
    const long ns = c.integer("dispersion", "samples", 400);
    if (ns < 2) throw InvalidSweep("samples must be at least 2, value " + std::to_string(ns));
    AssemblyOptions opt;
    opt.check_admissibility = !c.boolean("dispersion", "limit", false);
    const auto bs = branches(dir, linspace(k0, k1, std::size_t(ns)), p, opt);
    const auto gaps = detect_band_gaps(bs);
    Output out(f.out, f.quiet);
    {
        auto os = out.open("dispersion.csv");
        os << "k,branch_index,omega,classification\n";
        for (std::size_t j = 0; j < bs.samples(); ++j)
            for (std::size_t b = 0; b < bs.size(); ++b)
                os << num(bs.k[j]) << ',' << b << ',' << num(bs.omega[b][j]) << ',' << to_string(bs.classification[b])
                   << '\n';
    }
    nlohmann::ordered_json js;
    js["gaps"] = nlohmann::ordered_json::array();
    for (const auto& gp : gaps.gaps) js["gaps"].push_back({{"lo", gp.lo}, {"hi", gp.hi}, {"resolution", gaps.resolution}});
    js["omega_max"] = gaps.omega_max;
    js["direction"] = {bs.direction[0], bs.direction[1], bs.direction[2]};
    js["samples"] = bs.samples();
    out.open("gaps.json") << js.dump(2) << "\n";
    std::ostringstream os;
    os << "dispersion " << to_string(p.variant) << ": " << bs.size() << " branches x " << bs.samples()
       << " samples, " << gaps.gaps.size() << " gap(s)\n";
    for (const auto& gp : gaps.gaps) os << "  gap [" << num(gp.lo) << ", " << num(gp.hi) << "]\n";
    out.say(os.str());
    return 0;
}

void write_convergence(const Output& out, const std::vector<CgRecord>& tr) {
    auto os = out.open("convergence.csv");
    os << "iter,residual,energy\n";
    for (const auto& r : tr) os << r.iter << ',' << num(r.residual) << ',' << num(r.energy) << '\n';
}

int cmd_statics(const ConfigFile& c, const Flags& f) {
    const MaterialParams p = material_of(c);
    const RunSettings r = run_settings(c, f);
    const Grid g(r.grid, r.backend);
    std::mt19937_64 rng(r.seed);
    const std::string problem = c.string("statics", "problem", "relaxed");
    CgOptions opt;
    opt.tol = c.number("statics", "tol", opt.tol);
    opt.jacobi = c.boolean("statics", "jacobi", opt.jacobi);
    opt.max_iter = std::size_t(c.integer("statics", "max_iter", 0));
    const double amp = c.number("statics", "amplitude", 1.0);
    Output out(f.out, f.quiet);
    std::ostringstream os;
    if (problem == "relaxed") {
        require_admissible(p);
        VectorField fb = random_band_limited<3>(g, rng, amp);
        TensorField M = random_band_limited<9>(g, rng, amp);
        // constant body force is not balanced on a periodic cell
        const auto m = mean(fb);
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t i = 0; i < g.nodes(); ++i) fb(k, i) -= m[k];
        const auto sol = solve_static_relaxed(StaticProblem{p, fb, M}, opt);
        write_convergence(out, sol.trace);
        write_snapshot(out.path("u_static.csv"), sol.u, SnapshotFormat::csv);
        write_snapshot(out.path("P_static.csv"), sol.P, SnapshotFormat::csv);
        os << "statics relaxed: " << sol.iterations << " iterations, residual " << sol.residual << ", energy "
           << num(sol.energy) << "\n";
    } else if (problem == "lazar") {
        TensorField sigma0 = Curl(random_band_limited<9>(g, rng, amp));
        const auto sol = solve_lazar(LazarProblem{p, sigma0, std::nullopt}, opt);
        write_convergence(out, sol.trace);
        write_snapshot(out.path("beta.csv"), sol.beta, SnapshotFormat::csv);
        os << "statics lazar: " << sol.iterations << " iterations, residual " << sol.residual
           << ", Euler-Lagrange residual " << lazar_residual(LazarProblem{p, sigma0, std::nullopt}, sol.beta)
           << ", energy " << num(sol.energy) << "\n";
    } else if (problem == "homogenization") {
        const auto h = homogenization_check(p);
        const auto ref = homogenized_moduli(p);
        os << "homogenization: mu_eff " << num(h.mu_eff) << " (closed form " << num(ref.mu) << "), 2mu+3lambda "
           << num(h.bulk_eff) << " (closed form " << num(ref.bulk) << ")\n";
        out.open("homogenization.txt") << os.str();
    } else {
        throw ConfigError("[statics] problem must be relaxed, lazar or homogenization, got '" + problem + "'");
    }
    out.say(os.str());
    return 0;
}

std::string verdict(const AdmissibilityReport& r) { return r.ok() ? "admissible" : "inadmissible"; }

template <class S>
EnergyTrace run_system(const S& sys, const Vec& q0, const Vec& v0, const RunSettings& r, double& dt_out) {
    const double dt_max = stable_dt(sys);
    dt_out = pick_dt(r, dt_max);
    return run_leapfrog(sys, q0, v0, 0.0, dt_out, dt_max, std::size_t(r.steps), std::size_t(r.stride)).trace;
}

int cmd_reduce(const ConfigFile& c, const Flags& f) {
    const std::string model = c.string("reduce", "model", "");
    Output out(f.out, f.quiet);
    std::ostringstream os;
    auto material = [&] { return material_of(c); };
    if (model == "eringen_claus") {
        const double a1 = c.number("reduce", "a1", 0), a2 = c.number("reduce", "a2", 1), a3 = c.number("reduce", "a3", 0);
        const auto al = map_eringen_claus(a1, a2, a3);
        MaterialParams p = material();
        p.alpha1 = al.alpha1;
        p.alpha2 = al.alpha2;
        p.alpha3 = al.alpha3;
        const auto rep = check_admissible(p);
        os << "mapping eringen_claus\ninput a1 " << num(a1) << "\ninput a2 " << num(a2) << "\ninput a3 " << num(a3)
           << "\nalpha1 " << num(al.alpha1) << "\nalpha2 " << num(al.alpha2) << "\nalpha3 " << num(al.alpha3) << "\n"
           << rep.summary() << "verdict " << verdict(rep) << "\n";
    } else if (model == "popov_kroener") {
        const double mu = c.number("reduce", "mu", 1), d = c.number("reduce", "d", 0.5), nu = c.number("reduce", "nu", 0);
        const auto al = map_popov_kroener(mu, d, nu);
        const auto q = popov_kroener_quadform(mu, d, nu);
        MaterialParams p = material();
        p.variant = Variant::PopovKroener;
        p.alpha1 = al.alpha1;
        p.alpha2 = al.alpha2;
        p.alpha3 = al.alpha3;
        const auto rep = check_admissible(p);
        os << "mapping popov_kroener\ninput mu " << num(mu) << "\ninput d " << num(d) << "\ninput nu " << num(nu)
           << "\nfrak_a1 " << num(q.a1) << "\nfrak_a2 " << num(q.a2) << "\nfrak_a3 " << num(q.a3) << "\nalpha1 "
           << num(al.alpha1) << "\nalpha2 " << num(al.alpha2) << "\nalpha3 " << num(al.alpha3) << "\n"
           << rep.summary() << "verdict " << verdict(rep) << "\n";
    } else if (model == "cowin_nunziato") {
        MaterialParams p = material();
        p.variant = Variant::Microvoid;
        const auto cn = map_cowin_nunziato(p);
        const auto rep = cowin_nunziato_positivity(cn);
        os << "mapping cowin_nunziato\ninput mu_e " << num(p.mu_e) << "\ninput lambda_e " << num(p.lambda_e)
           << "\ninput mu_h " << num(p.mu_h) << "\ninput lambda_h " << num(p.lambda_h) << "\ninput alpha2 "
           << num(p.alpha2) << "\nmu_v " << num(cn.mu_v) << "\nlambda_v " << num(cn.lambda_v) << "\nalpha_v "
           << num(cn.alpha_v) << "\nb_v " << num(cn.b_v) << "\nxi_v " << num(cn.xi_v) << "\n"
           << rep.summary() << "verdict " << (rep.ok() ? "positive" : "not positive") << "\n";
    } else if (model == "teisseyre") {
        MaterialParams p = material();
        p.variant = Variant::TeisseyreEinstein;
        const auto [a1, a2] = teisseyre_einstein(p.alpha3);
        p.alpha1 = a1;
        p.alpha2 = a2;
        const RunSettings r = run_settings(c, f);
        const Grid g(r.grid, r.backend);
        std::mt19937_64 rng(r.seed);
        const double res = symmetry_residual(p, random_band_limited<9>(g, rng));
        const auto rep = check_admissible(p);
        os << "mapping teisseyre\ninput alpha3 " << num(p.alpha3) << "\nalpha1 " << num(a1) << "\nalpha2 " << num(a2)
           << "\nsymmetry residual (random P) " << res << "\n"
           << rep.summary() << "verdict " << verdict(rep) << "\n";
    } else if (model == "cosserat" || model == "cosserat_vector" || model == "microstretch" || model == "microvoid" ||
               model == "microstrain") {
        MaterialParams p = material();
        const std::string form = c.string("reduce", "microstrain_form", "dislocation");
        if (form != "dislocation" && form != "gradient")
            throw ConfigError("[reduce] microstrain_form must be dislocation or gradient, got '" + form + "'");
        p.microstrain_gradient = form == "gradient";
        const RunSettings r = run_settings(c, f);
        const Grid g(r.grid, r.backend);
        std::mt19937_64 rng(r.seed);
        const double amp = c.number("reduce", "amplitude", 1.0);
        auto rv = [&] { return random_band_limited<3>(g, rng, amp); };
        double dt = 0.0;
        EnergyTrace tr;
        if (model == "cosserat") {
            CosseratTensorSystem s(p, g);
            tr = run_system(s, s.pack(rv(), anti_field(rv())), s.pack(rv(), anti_field(rv())), r, dt);
        } else if (model == "cosserat_vector") {
            CosseratVectorSystem s(p, g);
            tr = run_system(s, s.pack(rv(), rv()), s.pack(rv(), rv()), r, dt);
        } else if (model == "microstretch") {
            MicrostretchSystem s(p, g);
            const auto z = random_band_limited<1>(g, rng, amp);
            tr = run_system(s, s.pack(rv(), rv(), z), s.pack(rv(), rv(), ScalarField(g)), r, dt);
        } else if (model == "microvoid") {
            MicrovoidSystem s(p, g);
            const auto z = random_band_limited<1>(g, rng, amp);
            tr = run_system(s, s.pack(rv(), z), s.pack(rv(), ScalarField(g)), r, dt);
        } else {
            MicrostrainSystem s(p, g);
            const auto S = random_symmetric(g, rng, amp);
            tr = run_system(s, s.pack(rv(), S), s.pack(rv(), TensorField(g)), r, dt);
        }
        write_trace(out, tr);
        os << "reduce " << model << " n=" << g.n() << " dt=" << num(dt) << " steps=" << r.steps << "\n"
           << trace_summary(tr);
    } else {
        throw ConfigError("[reduce] model must be one of eringen_claus, popov_kroener, cowin_nunziato, teisseyre, "
                          "cosserat, cosserat_vector, microstretch, microvoid, microstrain; got '" + model + "'");
    }
    out.open("reduce.txt") << os.str();
    out.say(os.str());
    return 0;
}

int cmd_identities(const ConfigFile& c, const Flags& f) {
    const RunSettings r = run_settings(c, f);
    const auto checks = identity_suite(r.grid, r.seed);
    const std::string text = identity_summary(checks);
    Output out(f.out, f.quiet);
    out.open("identities.txt") << text;
    out.say(text);
    for (const auto& k : checks)
        if (!k.passed()) {
            std::cerr << "error: NumericalFailure: identity " << k.item << ") failed, residual " << k.residual << "\n";
            return 2;
        }
    return 0;
}

int exit_code_for(const std::string& name) {
    static const std::set<std::string> numerical{"UnstableTimestep", "NoConvergence", "SingularProblem",
                                                 "NonFiniteValue", "MisassembledSymbol"};
    return numerical.count(name) ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relaxed micromorphic continuum solver"};
    app.require_subcommand(1);
    Flags flags;
    const char* names[] = {"simulate", "dispersion", "statics", "reduce", "identities", "params-check"};
    for (const char* n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", flags.config, "configuration file")->required();
        sub->add_option("--seed", flags.seed, "seed of the random source");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--backend", flags.backend, "spectral or fd2");
        sub->add_option("--grid", flags.grid, "nodes per axis");
        sub->add_flag("--quiet", flags.quiet, "suppress stdout summaries");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const ConfigFile c = ConfigFile::load(flags.config);
        c.require_known(allowed_sections());
        if (cmd == "params-check") return cmd_params_check(c, flags);
        if (cmd == "simulate") return cmd_simulate(c, flags);
        if (cmd == "dispersion") return cmd_dispersion(c, flags);
        if (cmd == "statics") return cmd_statics(c, flags);
        if (cmd == "reduce") return cmd_reduce(c, flags);
        return cmd_identities(c, flags);
    } catch (const InadmissibleParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            const auto rep = check_admissible(material_of(ConfigFile::load(flags.config)));
            std::cout << rep.summary();
        } catch (...) {
        }
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.name());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
