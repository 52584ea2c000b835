// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "micromorphic/micromorphic.hpp"

using namespace micromorphic;

namespace {

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double d, double s) { return s > 0 ? d / s : d; }

Tensor2 random_tensor(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Tensor2 X;
    for (int c = 0; c < 9; ++c) X[c] = u(rng);
    return X;
}

// 1 -------------------------------------------------------------------------
Outcome tensor_algebra() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst[5] = {0, 0, 0, 0, 0};
    for (int t = 0; t < 1000; ++t) {
        const Tensor2 X = random_tensor(rng);
        const auto c = cartan_decompose(X);
        const double n2 = norm2(X);
        worst[0] = std::max({worst[0], std::abs(inner(c.devsym, c.skew)) / n2, std::abs(inner(c.devsym, c.sph)) / n2,
                             std::abs(inner(c.skew, c.sph)) / n2});
        worst[1] = std::max(worst[1], std::abs(norm2(c.devsym) + norm2(c.skew) + norm2(c.sph) - n2) / n2);
        const Vector3 v{{u(rng), u(rng), u(rng)}};
        worst[2] = std::max({worst[2], norm(axl(anti(v)) - v) / norm(v),
                             norm(anti(axl(skew(X))) - skew(X)) / norm(skew(X))});
        const Tensor2 W = skew(random_tensor(rng));
        worst[3] = std::max(worst[3], std::abs(dot(v, axl(W)) - 0.5 * inner(anti(v), W)) / (norm(v) * norm(W)));
        const double a1 = u(rng), a2 = u(rng), a3 = u(rng);
        const auto q = quadform_decompose(a1, a2, a3);
        const double lhs = a1 * n2 + a2 * inner(X, transpose(X)) + a3 * tr(X) * tr(X);
        const double rhs = q.c_devsym * norm2(c.devsym) + q.c_skew * norm2(c.skew) + q.c_sph * tr(X) * tr(X);
        worst[4] = std::max(worst[4], std::abs(lhs - rhs) / ((std::abs(a1) + std::abs(a2) + 3 * std::abs(a3)) * n2));
    }
    double w = 0;
    for (double x : worst) w = std::max(w, x);
    return {w < 1e-12, fmt("1000 draws: Cartan orthogonality %.1e, Pythagoras %.1e, axl/anti %.1e", worst[0], worst[1],
                           worst[2]) +
                           fmt(", adjoint %.1e, quadratic form %.1e", worst[3], worst[4])};
}

// 2 -------------------------------------------------------------------------
Outcome identity_items() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = identity_suite(16, 42);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int failed = 0;
    std::string first;
    for (const auto& c : checks)
        if (!c.passed()) {
            if (!failed) first = " first failure: " + c.item + ") " + c.name;
            ++failed;
        }
    return {failed == 0 && secs < 30.0,
            fmt("%g checks, %g failed, %.2f s", double(checks.size()), double(failed), secs) + first};
}

// 3 -------------------------------------------------------------------------
Outcome energy_conservation() {
    const Grid g(16, Backend::spectral);
    struct Case {
        const char* name;
        MaterialParams p;
    };
    std::vector<Case> cases;
    MaterialParams base;
    base.mu_e = 1.0;
    base.lambda_e = 0.5;
    base.mu_h = 0.8;
    base.lambda_h = 0.3;
    base.alpha1 = 1.0;
    base.alpha2 = 0.7;
    base.alpha3 = 0.4;
    for (Variant v : {Variant::Relaxed, Variant::FurtherRelaxedDevDev, Variant::EringenClaus,
                      Variant::ClassicalMindlinEringen}) {
        MaterialParams p = base;
        p.variant = v;
        if (v == Variant::EringenClaus) p.mu_c = 1.0;
        cases.push_back({to_string(v).c_str(), p});
    }
    double worst_drift = 0.0, worst_growth = -1.0;
    std::string names;
    for (auto& c : cases) {
        std::mt19937_64 rng(7);
        State s = State::zero(g);
        s.u = random_band_limited<3>(g, rng);
        s.P = random_band_limited<9>(g, rng);
        s.udot = random_band_limited<3>(g, rng);
        s.Pdot = random_band_limited<9>(g, rng);
        const double dt_max = estimate_stable_dt(c.p, g);
        const auto r = run(s, c.p, Forcing::none(), 0.5 * dt_max, 1000, 1, dt_max);
        const double e0 = r.trace.front().total();
        double growth = -1.0;
        for (const auto& e : r.trace) growth = std::max(growth, (e.total() - e0) / e0);
        worst_drift = std::max(worst_drift, relative_energy_drift(r.trace));
        worst_growth = std::max(worst_growth, growth);
    }
    return {worst_drift < 1e-6 && worst_growth <= 1e-6,
            fmt("4 variants x 1000 steps at 0.5 dt_max: max drift %.2e, max growth %.2e", worst_drift, worst_growth)};
}

// 4 -------------------------------------------------------------------------
Outcome dispersion_k0() {
    MaterialParams p;  // (1, 0, 0, 1, 0)
    const auto sp0 = symbol_spectrum(assemble_symbol(Vector3{{0, 0, 0}}, p));
    int zeros = 0, fours = 0;
    double err = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double w = sp0.omega2[i];
        if (std::abs(w) < 1e-10) ++zeros;
        else if (std::abs(w - 4.0) < 1e-10) ++fours;
        err = std::max(err, std::min(std::abs(w), std::abs(w - 4.0)));
    }
    p.mu_c = 1.0;
    const auto sp1 = symbol_spectrum(assemble_symbol(Vector3{{0, 0, 0}}, p));
    int z1 = 0, f1 = 0, t1 = 0;
    for (int i = 0; i < 12; ++i) {
        const double w = sp1.omega2[i];
        if (std::abs(w) < 1e-10) ++z1;
        else if (std::abs(w - 2.0) < 1e-10) ++t1;
        else if (std::abs(w - 4.0) < 1e-10) ++f1;
    }
    const bool ok = zeros == 6 && fours == 6 && z1 == 3 && t1 == 3 && f1 == 6;
    return {ok, fmt("mu_c=0: %g zeros, %g fours", zeros, fours) +
                    fmt("; mu_c=1: %g zeros, %g twos, %g fours", z1, t1, f1) +
                    fmt(" (max dev %.1e)", err)};
}

// 5 -------------------------------------------------------------------------
Outcome wave_claims() {
    const Vector3 dir{{1, 0, 0}};
    AssemblyOptions limit{false};
    // (a) mu_h = lambda_h = 0
    MaterialParams pa;
    pa.mu_h = 0.0;
    pa.lambda_h = 0.0;
    const auto ks = linspace(0.0, 0.1, 21);
    const auto ba = branches(dir, ks, pa, limit);
    double vmax = 0.0;
    int acoustic_a = 0;
    for (std::size_t b = 0; b < ba.size(); ++b) {
        if (ba.omega[b][0] > 1e-8 || ba.u_fraction[b][1] < 0.5) continue;
        ++acoustic_a;
        for (std::size_t j = 1; j < ks.size(); ++j) vmax = std::max(vmax, ba.omega[b][j] / ks[j]);
    }
    const bool a_ok = acoustic_a == 3 && vmax < 1e-6;
    // (b) alpha = 0
    MaterialParams pb;
    pb.alpha1 = pb.alpha2 = pb.alpha3 = 0.0;
    const auto kb = linspace(0.0, 8.0, 400);
    const auto bb = branches(dir, kb, pb, limit);
    double flat = 0.0, slope_min = 1e300;
    int nP = 0, nU = 0;
    for (std::size_t b = 0; b < bb.size(); ++b) {
        double umax = 0.0;
        for (double f : bb.u_fraction[b]) umax = std::max(umax, f);
        const auto [lo, hi] = std::minmax_element(bb.omega[b].begin(), bb.omega[b].end());
        if (umax < 1e-8) {
            ++nP;
            flat = std::max(flat, *hi - *lo);
        } else if (bb.omega[b][0] < 1e-8 && bb.u_fraction[b][1] > 0.5) {
            ++nU;
            slope_min = std::min(slope_min, (bb.omega[b][1] - bb.omega[b][0]) / (kb[1] - kb[0]));
        }
    }
    const bool b_ok = nP > 0 && flat < 1e-8 && nU == 3 && slope_min > 1e-3;
    // (c) band gap
    MaterialParams pc;
    const auto gap0 = detect_band_gaps(branches(dir, kb, pc));
    pc.mu_c = 2.0;
    const auto gap2 = detect_band_gaps(branches(dir, kb, pc));
    const bool c_ok = gap0.gaps.empty() && !gap2.gaps.empty();
    std::string out = std::string("(a) ") + (a_ok ? "ok" : "FAIL") + fmt(" max v_g %.1e over %g branches; ", vmax, acoustic_a) +
                      "(b) " + (b_ok ? "ok" : "FAIL") + fmt(" P-branch spread %.1e on %g branches, min u slope %.3f; ", flat, nP, slope_min) +
                      "(c) " + (c_ok ? "ok" : "FAIL") + fmt(" gaps mu_c=0: %g, mu_c=2: %g", double(gap0.gaps.size()), double(gap2.gaps.size()));
    if (!gap2.gaps.empty()) out += fmt(" [%.4f, %.4f]", gap2.gaps.front().lo, gap2.gaps.front().hi);
    return {a_ok && b_ok && c_ok, out};
}

// 6 -------------------------------------------------------------------------
Outcome dynamics_vs_dispersion() {
    const Grid g(16, Backend::spectral);
    MaterialParams p;
    p.lambda_e = 0.5;
    p.mu_c = 0.3;
    const Vector3 k{{1, 0, 0}};
    const auto sp = symbol_spectrum(assemble_symbol(k, p));
    int e = 0;
    while (e < 12 && sp.omega2[e] <= 0.0) ++e;
    const double omega = std::sqrt(sp.omega2[e]);
    const Amplitude w = sp.vectors.col(e);
    FullSystem sys(p, g);
    Vec q0(sys.dim());
    const std::size_t n = g.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        const Vector3 x = g.coord(i);
        const Complex ph = std::exp(Complex(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
        for (int c = 0; c < 12; ++c) q0[c * n + i] = (w[c] * ph).real();
    }
    const double dt_max = stable_dt(sys);
    const double dt = 0.1 * dt_max;
    const double qq = sys.mass_inner(q0, q0);
    double worst = 0.0, prev_phase = 0.0;
    Observer<FullSystem> obs = [&](std::size_t, const Leapfrog<FullSystem>& lf) {
        const double c = sys.mass_inner(lf.q(), q0) / qq;
        const double s = sys.mass_inner(lf.v(), q0) / qq;
        double ph = std::atan2(-s / omega, c);
        while (ph < prev_phase - std::numbers::pi) ph += 2 * std::numbers::pi;
        prev_phase = ph;
        worst = std::max(worst, std::abs(ph - omega * lf.t()));
    };
    run_leapfrog(sys, q0, Vec(sys.dim(), 0.0), 0.0, dt, dt_max, 200, 1, obs);
    return {worst < 1e-3, fmt("omega %.6f, 200 steps at dt = 0.1 dt_max: max phase error %.2e", omega, worst)};
}

// 7 -------------------------------------------------------------------------
Outcome homogenization() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double err = 0.0;
    bool below = true;
    for (int t = 0; t < 20; ++t) {
        MaterialParams p;
        p.mu_e = 0.2 + 3 * u(rng);
        p.mu_h = 0.2 + 3 * u(rng);
        p.lambda_e = -2 * p.mu_e / 3 + 0.05 + 2 * u(rng);
        p.lambda_h = -2 * p.mu_h / 3 + 0.05 + 2 * u(rng);
        p.mu_c = 2 * u(rng);
        const auto h = homogenization_check(p);
        const double mu = p.mu_e * p.mu_h / (p.mu_e + p.mu_h);
        const double ke = 2 * p.mu_e + 3 * p.lambda_e, kh = 2 * p.mu_h + 3 * p.lambda_h;
        const double bulk = ke * kh / (ke + kh);
        err = std::max({err, std::abs(h.mu_eff - mu) / mu, std::abs(h.bulk_eff - bulk) / bulk});
        below = below && h.mu_eff < std::min(p.mu_e, p.mu_h);
    }
    return {err < 1e-10 && below, fmt("20 random sets: max rel err %.2e, mu_eff < min(mu_e, mu_h): ", err) +
                                      (below ? "yes" : "no")};
}

// 8 -------------------------------------------------------------------------
Outcome reductions_equivalence() {
    const Grid g(16, Backend::spectral);
    MaterialParams p;
    p.mu_e = 1.0;
    p.lambda_e = 0.5;
    p.mu_c = 0.7;
    p.mu_h = 1.2;
    p.lambda_h = 0.2;
    p.alpha1 = 1.0;
    p.alpha2 = 0.8;
    p.alpha3 = 0.6;
    std::mt19937_64 rng(5);
    const VectorField u0 = random_band_limited<3>(g, rng), v0 = random_band_limited<3>(g, rng);
    const VectorField th0 = random_band_limited<3>(g, rng), w0 = random_band_limited<3>(g, rng);

    // Cosserat tensor vs vector form
    CosseratTensorSystem ts(p, g);
    CosseratVectorSystem vs(p, g);
    const double dt_max = stable_dt(ts);
    const double dt = 0.5 * dt_max;
    Leapfrog<CosseratTensorSystem> lt(ts, ts.pack(u0, anti_field(th0)), ts.pack(v0, anti_field(w0)), 0, dt, dt_max);
    Leapfrog<CosseratVectorSystem> lv(vs, vs.pack(u0, th0), vs.pack(v0, w0), 0, dt, dt_max);
    double cos_err = 0.0;
    std::vector<Vec> vector_traj;
    for (int k = 0; k < 500; ++k) {
        lt.step();
        lv.step();
        const auto [ut, A] = ts.unpack(lt.q());
        const auto [uv, th] = vs.unpack(lv.q());
        vector_traj.push_back(lv.q());
        cos_err = std::max({cos_err, rel(l2_norm(A - anti_field(th)), l2_norm(A)), rel(l2_norm(ut - uv), l2_norm(ut))});
    }

    // Microstretch with zeta = 0 and solenoidal u
    const VectorField us = curl(random_band_limited<3>(g, rng)), usd = curl(random_band_limited<3>(g, rng));
    MicrostretchSystem ms(p, g);
    Leapfrog<MicrostretchSystem> lm(ms, ms.pack(us, th0, ScalarField(g)), ms.pack(usd, w0, ScalarField(g)), 0, dt,
                                    dt_max);
    Leapfrog<CosseratVectorSystem> lc(vs, vs.pack(us, th0), vs.pack(usd, w0), 0, dt, dt_max);
    double ms_err = 0.0, zeta_max = 0.0;
    for (int k = 0; k < 500; ++k) {
        lm.step();
        lc.step();
        const auto [um, thm, z] = ms.unpack(lm.q());
        const auto [uc, thc] = vs.unpack(lc.q());
        ms_err = std::max({ms_err, rel(l2_norm(um - uc), l2_norm(uc)), rel(l2_norm(thm - thc), l2_norm(thc))});
        zeta_max = std::max(zeta_max, z.max_abs());
    }

    // Microvoid zeta equation vs spherical projection of the relaxed rhs
    MicrovoidSystem mv(p, g);
    MaterialParams pr = p;
    pr.variant = Variant::Relaxed;
    const ScalarField z0 = random_band_limited<1>(g, rng), zd = random_band_limited<1>(g, rng);
    Leapfrog<MicrovoidSystem> lvd(mv, mv.pack(u0, z0), mv.pack(v0, zd), 0, 0.5 * stable_dt(mv), stable_dt(mv));
    double mv_err = 0.0;
    for (int k = 0; k <= 50; ++k) {
        if (k) lvd.step();
        const auto [u, z] = mv.unpack(lvd.q());
        State s = State::zero(g);
        s.u = u;
        for (std::size_t i = 0; i < g.nodes(); ++i) s.P.set(i, z(0, i) * Tensor2::identity());
        const auto a = rhs_relaxed(s, pr);
        const ScalarField za = mv.zeta_acceleration(u, z);
        ScalarField proj(g);
        for (std::size_t i = 0; i < g.nodes(); ++i) proj(0, i) = tr(a.P_acc.tensor(i)) / 3.0;
        Vec am;
        mv.acceleration_free(lvd.q(), am);
        const auto [ua, zz] = mv.unpack(am);
        mv_err = std::max({mv_err, rel(l2_norm(za - proj), l2_norm(proj)), rel(l2_norm(ua - a.u_acc), l2_norm(a.u_acc))});
    }
    const bool ok = cos_err < 1e-8 && ms_err < 1e-10 && zeta_max < 1e-10 && mv_err < 1e-10;
    return {ok, fmt("Cosserat forms %.2e; microstretch(zeta=0) vs Cosserat %.2e (max |zeta| %.1e); ", cos_err,
                    ms_err, zeta_max) +
                    fmt("microvoid projection %.2e", mv_err)};
}

// 9 -------------------------------------------------------------------------
Outcome mappings() {
    std::vector<std::string> bad;
    auto expect = [&](bool c, const char* what) {
        if (!c) bad.push_back(what);
    };
    auto near = [](double a, double b, double tol = 1e-15) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
    {
        const auto a = map_eringen_claus(0, 1, 0);
        expect(near(a.alpha1, 1) && near(a.alpha2, 1) && near(a.alpha3, 1.0 / 3.0), "EC (0,1,0)");
        const auto b = map_eringen_claus(1, 0, 0);
        MaterialParams p;
        p.alpha1 = b.alpha1;
        p.alpha2 = b.alpha2;
        p.alpha3 = b.alpha3;
        expect(near(b.alpha2, -2) && !check_admissible(p).ok(), "EC (1,0,0) inadmissible");
        const auto inv = eringen_claus_from_alphas(map_eringen_claus(0.3, 1.7, 0.4));
        expect(near(inv.a1, 0.3, 1e-14) && near(inv.a2, 1.7, 1e-14) && near(inv.a3, 0.4, 1e-14), "EC round trip");
        // field level: Curl(m^T) both ways
        const Grid g(16, Backend::spectral);
        std::mt19937_64 rng(3);
        const TensorField P = random_band_limited<9>(g, rng);
        const double a1 = 0.3, a2 = 1.7, a3 = 0.4;
        const auto al = map_eringen_claus(a1, a2, a3);
        MaterialParams q;
        q.alpha1 = al.alpha1;
        q.alpha2 = al.alpha2;
        q.alpha3 = al.alpha3;
        const TensorField X = Curl(P);
        const TensorField mEC = map_tensor(X, [&](const Tensor2& x) { return eringen_claus_moment(a1, a2, a3, x); });
        const TensorField lhs = Curl(map_tensor(mEC, [](const Tensor2& x) { return transpose(x); }));
        const TensorField rhs = curl_moment(q, P);
        expect(rel(l2_norm(lhs - rhs), l2_norm(rhs)) < 1e-10, "EC field-level Curl(m^T)");
    }
    {
        const auto a = map_popov_kroener(1, 0.5, 0);
        expect(near(a.alpha1, 0.125) && near(a.alpha2, 0.125) && a.alpha3 == 0.0, "PK (1, 1/2, 0)");
        const auto b = map_popov_kroener(1, 0.5, 0.25);
        expect(near(b.alpha1, 0.125) && near(b.alpha2, 13.0 / 72.0), "PK nu = 1/4");
        const auto f = popov_kroener_quadform(1, 0.5, 0.25);
        const auto qd = quadform_decompose(f.a1, f.a2, f.a3);
        expect(near(qd.c_devsym, b.alpha1, 1e-14) && near(qd.c_skew, b.alpha2, 1e-14) &&
                   std::abs(qd.c_sph) < 1e-15,
               "PK quadform route");
        bool threw = false;
        try {
            map_popov_kroener(1, 0.5, 0.5);
        } catch (const PoissonOutOfRange&) {
            threw = true;
        }
        expect(threw, "PK nu = 1/2 rejected");
    }
    {
        MaterialParams p;
        p.mu_e = p.lambda_e = p.mu_h = p.lambda_h = 1.0;
        p.alpha2 = 3.0;
        p.variant = Variant::Microvoid;
        const auto c = map_cowin_nunziato(p);
        expect(near(c.mu_v, 1) && near(c.lambda_v, 1) && near(c.alpha_v, 2) && near(c.b_v, -5.0 / 3.0, 1e-15) &&
                   near(c.xi_v, 10, 1e-14),
               "CN example");
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        bool all = true;
        for (int t = 0; t < 100; ++t) {
            MaterialParams r;
            r.variant = Variant::Microvoid;
            r.mu_e = 0.1 + 2 * u(rng);
            r.mu_h = 0.1 + 2 * u(rng);
            r.lambda_e = -2 * r.mu_e / 3 + 1e-3 + 2 * u(rng);
            r.lambda_h = -2 * r.mu_h / 3 + 1e-3 + 2 * u(rng);
            r.alpha2 = 0.1 + u(rng);
            all = all && cowin_nunziato_positivity(map_cowin_nunziato(r)).ok();
        }
        expect(all, "CN positivity");
    }
    {
        const auto [a1, a2] = teisseyre_einstein(1.0);
        expect(a1 == -6.0 && a2 == 6.0, "Teisseyre (-6, 6)");
        const Grid g(16, Backend::spectral);
        std::mt19937_64 rng(17);
        const TensorField P = random_band_limited<9>(g, rng);
        MaterialParams e;
        e.alpha3 = 1.0;
        e = with_einstein_choice(e);
        expect(check_symmetry(e, P), "Remark i)");
        const TensorField S = random_symmetric(g, rng);
        MaterialParams q;
        q.alpha1 = 1;
        q.alpha2 = -1;
        q.alpha3 = 0;
        expect(check_symmetry(q, S), "Remark ii) alpha1 = -alpha2");
        q.alpha2 = 1;
        expect(!check_symmetry(q, S) && symmetry_residual(q, S) > 1e-3, "Remark ii) witness alpha1 = alpha2");
    }
    std::string d = bad.empty() ? "EC, PK, CN, Teisseyre formulas and field checks agree" : "failed:";
    for (auto& b : bad) d += " [" + b + "]";
    return {bad.empty(), d};
}

// 10 ------------------------------------------------------------------------
double einstein_curvature_energy(const TensorField& P, double alpha3) {
    MaterialParams e;
    e.alpha3 = alpha3;
    e = with_einstein_choice(e);
    const TensorField X = Curl(P);
    double s = 0.0;
    for (std::size_t i = 0; i < P.nodes(); ++i) {
        const Tensor2 x = X.tensor(i);
        s += 0.5 * inner(moment_stress(x, e), x);
    }
    return s * P.grid().cell_volume();
}

Outcome indefiniteness() {
    const Grid g(16, Backend::spectral);
    // symmetric witness with symmetric trace-free Curl: S = sin(x1) (e2 x e3 + e3 x e2)
    const TensorField neg = sample<9>(g, [](const Vector3& x) {
        Tensor2 t;
        t(1, 2) = t(2, 1) = std::sin(x[0]);
        return t;
    });
    // spherical field: Curl(zeta 1) is skew
    const TensorField pos = sample<9>(g, [](const Vector3& x) { return 0.5 * std::sin(x[1]) * Tensor2::identity(); });
    const double en = einstein_curvature_energy(neg, 1.0), ep = einstein_curvature_energy(pos, 1.0);
    return {en < 0.0 && ep > 0.0, fmt("curvature energy %.6f on witness, %.6f on spherical field", en, ep)};
}

// 11 ------------------------------------------------------------------------
Outcome lazar_statics() {
    const Grid g(16, Backend::spectral);
    MaterialParams p;
    p.mu_e = 1.0;
    p.lambda_e = 0.5;
    p.mu_c = 0.5;
    p.alpha1 = 1.0;
    p.alpha2 = 0.8;
    p.alpha3 = 0.6;
    std::mt19937_64 rng(23);
    TensorField sigma0 = Curl(random_band_limited<9>(g, rng));
    for (std::size_t i = 0; i < g.nodes(); ++i) sigma0.set(i, sigma0.tensor(i) + Tensor2::identity() * 0.3);
    LazarProblem prob{p, sigma0, std::nullopt};
    CgOptions opt;
    opt.tol = 1e-12;
    const auto s1 = solve_lazar(prob, opt, random_band_limited<9>(g, rng));
    const auto s2 = solve_lazar(prob, opt, random_band_limited<9>(g, rng));
    const double el = lazar_residual(prob, s1.beta);
    const double agree = rel(l2_norm(s1.beta - s2.beta), l2_norm(s1.beta));
    // energy gradient by central differences along random directions
    const TensorField b = random_band_limited<9>(g, rng);
    const TensorField grad = lazar_gradient(prob, b);
    double fd = 0.0;
    for (int t = 0; t < 3; ++t) {
        const TensorField d = random_band_limited<9>(g, rng);
        const double eps = 1e-4;
        const double num = (lazar_energy(prob, b + eps * d) - lazar_energy(prob, b - eps * d)) / (2 * eps);
        double ana = 0.0;
        for (std::size_t k = 0; k < d.data().size(); ++k) ana += grad.data()[k] * d.data()[k];
        fd = std::max(fd, std::abs(num - ana) / std::abs(ana));
    }
    return {el < 1e-8 && fd < 1e-6 && agree < 1e-8,
            fmt("EL residual %.2e, gradient FD %.2e, two starts differ by %.2e", el, fd, agree)};
}

}  // namespace

int main() {
    struct Item {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Item> items{
        {"1 tensor algebra", tensor_algebra},
        {"2 identity suite a)-q)", identity_items},
        {"3 energy conservation", energy_conservation},
        {"4 k = 0 symbol spectrum", dispersion_k0},
        {"5 wave claims (a)(b)(c)", wave_claims},
        {"6 plane-wave phase", dynamics_vs_dispersion},
        {"7 homogenization", homogenization},
        {"8 reduction equivalences", reductions_equivalence},
        {"9 coefficient mappings", mappings},
        {"10 Einstein-choice indefiniteness", indefiniteness},
        {"11 Lazar statics", lazar_statics},
    };
    int failed = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& it : items) {
        Outcome o;
        const auto s = std::chrono::steady_clock::now();
        try {
            o = it.fn();
        } catch (const Error& e) {
            o = {false, std::string("threw ") + e.name() + ": " + e.what()};
        } catch (const std::exception& e) {
            o = {false, std::string("threw ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count();
        if (!o.ok) ++failed;
        std::printf("%s  %-36s %s (%.1f s)\n", o.ok ? "PASS" : "FAIL", it.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/%zu criteria passed in %.1f s\n", int(items.size()) - failed, items.size(), total);
    return failed ? 1 : 0;
}
