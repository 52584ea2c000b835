#ifndef MICROMORPHIC_DYNAMICS_HPP
#define MICROMORPHIC_DYNAMICS_HPP

// Coupled (u, P) elastodynamics on periodic grids:
//   rho u_tt = Div sigma + f
//   rho P_tt = -Curl m + sigma - s + M      (relaxed family)
//   rho P_tt = alpha1 Div Grad P + sigma - s + M   (classical variant)

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/grid.hpp"
#include "micromorphic/leapfrog.hpp"

namespace micromorphic {

struct Forcing {
    // Adds f(t) and M(t) into the (zero-initialized) fields.
    std::function<void(double, VectorField&, TensorField&)> eval;

    bool active() const { return bool(eval); }

    static Forcing none() { return {}; }
    static Forcing constant(VectorField f, TensorField M) {
        return {[f = std::move(f), M = std::move(M)](double, VectorField& fo, TensorField& Mo) {
            fo += f;
            Mo += M;
        }};
    }
    /// f(t) = g(t) f0, M(t) = g(t) M0
    static Forcing modulated(VectorField f, TensorField M, std::function<double(double)> g) {
        return {[f = std::move(f), M = std::move(M), g = std::move(g)](double t, VectorField& fo,
                                                                       TensorField& Mo) {
            const double s = g(t);
            fo.axpy(s, f);
            Mo.axpy(s, M);
        }};
    }
};

struct State {
    VectorField u, udot;
    TensorField P, Pdot;
    double t = 0.0;

    static State zero(const Grid& g) { return {VectorField(g), VectorField(g), TensorField(g), TensorField(g), 0.0}; }
    const Grid& grid() const { return u.grid(); }
};

struct Accelerations {
    VectorField u_acc;
    TensorField P_acc;
};

namespace detail {

inline void require_state_grid(const State& s) {
    require_same_grid(s.u.grid(), s.udot.grid());
    require_same_grid(s.u.grid(), s.P.grid());
    require_same_grid(s.u.grid(), s.Pdot.grid());
}

/// Unforced, unscaled forces (-dU/dq per unit volume) for a full variant.
inline Accelerations full_forces(const VectorField& u, const TensorField& P, const MaterialParams& p) {
    require_same_grid(u.grid(), P.grid());
    const Grid& g = u.grid();
    const TensorField gu = Grad(u);
    const bool classical = p.variant == Variant::ClassicalMindlinEringen;
    TensorField X = classical ? TensorField(g) : Curl(P);
    TensorField sigma(g), rest(g), m(g);
    for (std::size_t i = 0; i < g.nodes(); ++i) {
        const Tensor2 Pi = P.tensor(i);
        const auto st = stresses_unchecked(gu.tensor(i), Pi, X.tensor(i), p);
        sigma.set(i, st.sigma);
        rest.set(i, st.sigma - st.s);
        if (!classical) m.set(i, st.m);
    }
    Accelerations r{Div(sigma), std::move(rest)};
    if (classical) r.P_acc.axpy(p.alpha1, laplacian(P));
    else r.P_acc -= Curl(m);
    return r;
}

inline EnergyParts full_potential(const VectorField& u, const TensorField& P, const MaterialParams& p) {
    const Grid& g = u.grid();
    const TensorField gu = Grad(u);
    const bool classical = p.variant == Variant::ClassicalMindlinEringen;
    const TensorField X = classical ? TensorField(g) : Curl(P);
    EnergyParts e;
    for (std::size_t i = 0; i < g.nodes(); ++i) e += energy_parts_unchecked(gu.tensor(i), P.tensor(i), X.tensor(i), p);
    if (classical) {
        const GradTensorField gp = Grad(P);
        double s = 0.0;
        for (double x : gp.data()) s += x * x;
        e.curvature = 0.5 * p.alpha1 * s;
    }
    e *= g.cell_volume();
    return e;
}

}  // namespace detail

/// Flat layout q = [u (3 comps), P (9 comps)], component-major.
class FullSystem {
public:
    FullSystem(const MaterialParams& p, const Grid& g, Forcing F = Forcing::none())
        : p_(p), g_(g), F_(std::move(F)) {
        if (!is_full_variant(p.variant))
            throw InadmissibleParams("variant " + to_string(p.variant) + " is not a (u, P) system");
        require_admissible(p);
    }

    const MaterialParams& params() const { return p_; }
    const Grid& grid() const { return g_; }
    std::size_t dim() const { return 12 * g_.nodes(); }

    Vec pack(const VectorField& u, const TensorField& P) const {
        require_same_grid(u.grid(), g_);
        require_same_grid(P.grid(), g_);
        Vec q(dim());
        std::copy(u.data().begin(), u.data().end(), q.begin());
        std::copy(P.data().begin(), P.data().end(), q.begin() + 3 * g_.nodes());
        return q;
    }
    std::pair<VectorField, TensorField> unpack(const Vec& q) const {
        const std::size_t n = g_.nodes();
        return {VectorField(g_, Vec(q.begin(), q.begin() + 3 * n)), TensorField(g_, Vec(q.begin() + 3 * n, q.end()))};
    }

    void acceleration_free(const Vec& q, Vec& a) const {
        auto [u, P] = unpack(q);
        auto f = detail::full_forces(u, P, p_);
        a = pack(f.u_acc, f.P_acc);
        if (p_.rho != 1.0)
            for (auto& x : a) x /= p_.rho;
    }
    void acceleration(const Vec& q, double t, Vec& a) const {
        auto [u, P] = unpack(q);
        auto f = detail::full_forces(u, P, p_);
        if (F_.active()) F_.eval(t, f.u_acc, f.P_acc);
        a = pack(f.u_acc, f.P_acc);
        if (p_.rho != 1.0)
            for (auto& x : a) x /= p_.rho;
    }
    double mass_inner(const Vec& a, const Vec& b) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return p_.rho * s * g_.cell_volume();
    }
    EnergyParts potential(const Vec& q) const {
        auto [u, P] = unpack(q);
        return detail::full_potential(u, P, p_);
    }
    double forcing_norm(double t) const {
        if (!F_.active()) return 0.0;
        VectorField f(g_);
        TensorField M(g_);
        F_.eval(t, f, M);
        return std::sqrt(inner(f, f) + inner(M, M));
    }

private:
    MaterialParams p_;
    Grid g_;
    Forcing F_;
};

/// Accelerations of the model selected by p.variant.
inline Accelerations rhs(const State& s, const MaterialParams& p, const Forcing& F = Forcing::none()) {
    detail::require_state_grid(s);
    if (!is_full_variant(p.variant))
        throw InadmissibleParams("variant " + to_string(p.variant) + " is not a (u, P) system");
    require_admissible(p);
    auto a = detail::full_forces(s.u, s.P, p);
    if (F.active()) F.eval(s.t, a.u_acc, a.P_acc);
    if (p.rho != 1.0) {
        a.u_acc *= 1.0 / p.rho;
        a.P_acc *= 1.0 / p.rho;
    }
    return a;
}

namespace detail {

inline Accelerations rhs_with_law(const State& s, MaterialParams p, const Forcing& F,
                                  std::initializer_list<Variant> same_law, Variant fallback) {
    require_admissible(p);
    bool keep = false;
    for (Variant v : same_law) keep = keep || v == p.variant;
    if (!keep) p.variant = fallback;
    detail::require_state_grid(s);
    auto a = detail::full_forces(s.u, s.P, p);
    if (F.active()) F.eval(s.t, a.u_acc, a.P_acc);
    if (p.rho != 1.0) {
        a.u_acc *= 1.0 / p.rho;
        a.P_acc *= 1.0 / p.rho;
    }
    return a;
}

}  // namespace detail

/// Relaxed law (full Curl-curvature with alpha3 term, full H).
inline Accelerations rhs_relaxed(const State& s, const MaterialParams& p, const Forcing& F = Forcing::none()) {
    return detail::rhs_with_law(s, p, F, {Variant::Relaxed, Variant::EringenClaus, Variant::TeisseyreEinstein},
                                Variant::Relaxed);
}

/// Further-relaxed law: no alpha3 term, micro term 2 mu_h devsym P.
inline Accelerations rhs_further_relaxed(const State& s, const MaterialParams& p,
                                         const Forcing& F = Forcing::none()) {
    return detail::rhs_with_law(s, p, F, {Variant::FurtherRelaxedDevDev, Variant::PopovKroener},
                                Variant::FurtherRelaxedDevDev);
}

/// Classical law with curvature 1/2 alpha1 ||grad P||^2.
inline Accelerations rhs_classical(const State& s, const MaterialParams& p, const Forcing& F = Forcing::none()) {
    MaterialParams q = p;
    q.variant = Variant::ClassicalMindlinEringen;
    return detail::rhs_with_law(s, q, F, {Variant::ClassicalMindlinEringen}, Variant::ClassicalMindlinEringen);
}

/// dt_max = 2 / sqrt(lambda_max) of the discrete operator.
inline double estimate_stable_dt(const MaterialParams& p, const Grid& g) {
    return stable_dt(FullSystem(p, g));
}

struct DynamicsRun {
    State state;
    EnergyTrace trace;
    double forcing_bound_factor;
};

/// Integrates from s0 for n_steps; dt_max defaults to the Lanczos estimate.
inline DynamicsRun run(const State& s0, const MaterialParams& p, const Forcing& F, double dt, std::size_t n_steps,
                       std::size_t stride = 1, double dt_max = 0.0,
                       const std::function<void(std::size_t, const State&)>& observer = {}) {
    detail::require_state_grid(s0);
    FullSystem sys(p, s0.grid(), F);
    if (dt_max <= 0.0) dt_max = stable_dt(sys);
    Observer<FullSystem> obs;
    if (observer)
        obs = [&](std::size_t k, const Leapfrog<FullSystem>& lf) {
            auto [u, P] = sys.unpack(lf.q());
            auto [ud, Pd] = sys.unpack(lf.v());
            observer(k, State{std::move(u), std::move(ud), std::move(P), std::move(Pd), lf.t()});
        };
    auto r = run_leapfrog(sys, sys.pack(s0.u, s0.P), sys.pack(s0.udot, s0.Pdot), s0.t, dt, dt_max, n_steps,
                          stride, obs);
    auto [u, P] = sys.unpack(r.q);
    auto [ud, Pd] = sys.unpack(r.v);
    return {State{std::move(u), std::move(ud), std::move(P), std::move(Pd), r.t}, std::move(r.trace),
            r.forcing_bound_factor};
}

/// One velocity-Verlet step. Throws UnstableTimestep when dt > 0.9 dt_max.
inline State step_leapfrog(const State& s, const MaterialParams& p, const Forcing& F, double dt, double dt_max) {
    return run(s, p, F, dt, 1, 1, dt_max).state;
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_DYNAMICS_HPP
