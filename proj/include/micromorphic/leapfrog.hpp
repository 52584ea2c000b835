#ifndef MICROMORPHIC_LEAPFROG_HPP
#define MICROMORPHIC_LEAPFROG_HPP

// Velocity-Verlet integration of linear conservative systems q'' = a(q, t)
// on flat coordinate vectors, a Lanczos estimate of the stable step, and
// energy traces.
//
// The reported kinetic energy is the leapfrog invariant
//   1/2 <v_{n-1/2}, v_{n+1/2}>_M = 1/2 |v_n|_M^2 - dt^2/8 |a_n|_M^2,
// which together with the potential is conserved exactly (to round-off)
// for zero forcing.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/error.hpp"

namespace micromorphic {

using Vec = std::vector<double>;

/// q'' = acceleration(q, t); acceleration_free drops the forcing and is
/// self-adjoint in mass_inner (the operator -M^{-1} K).
template <class S>
concept LeapfrogSystem = requires(const S& s, const Vec& q, Vec& a, double t) {
    { s.dim() } -> std::convertible_to<std::size_t>;
    s.acceleration(q, t, a);
    s.acceleration_free(q, a);
    { s.mass_inner(q, q) } -> std::convertible_to<double>;
    { s.potential(q) } -> std::convertible_to<EnergyParts>;
    { s.forcing_norm(t) } -> std::convertible_to<double>;
};

struct EnergyRecord {
    double t;
    double kinetic;
    double elastic;
    double micro;
    double curvature;
    double total() const { return kinetic + elastic + micro + curvature; }
};

using EnergyTrace = std::vector<EnergyRecord>;

inline constexpr double kStableDtSafety = 0.9;

inline void check_timestep(double dt, double dt_max) {
    if (!(std::abs(dt) <= kStableDtSafety * dt_max)) {
        std::ostringstream os;
        os << "timestep " << std::abs(dt) << " exceeds " << kStableDtSafety << " * dt_max = "
           << kStableDtSafety * dt_max;
        throw UnstableTimestep(os.str());
    }
}

struct LanczosResult {
    double lambda_max;
    int iterations;
    double residual;  // relative Ritz residual of the top pair
};

/// Largest eigenvalue of -acceleration_free by Lanczos with full
/// reorthogonalization in the mass inner product.
template <LeapfrogSystem S>
LanczosResult lanczos_lambda_max(const S& sys, double rel_tol = 1e-6, int max_iter = 200,
                                 unsigned seed = 12345) {
    const std::size_t n = sys.dim();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec> basis;
    Vec v(n), w(n);
    for (auto& x : v) x = normal(rng);
    double nv = std::sqrt(sys.mass_inner(v, v));
    for (auto& x : v) x /= nv;
    std::vector<double> alpha, beta;
    double theta = 0.0, prev = -1.0, resid = 1.0;
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        basis.push_back(v);
        sys.acceleration_free(v, w);
        for (auto& x : w) x = -x;
        const double a = sys.mass_inner(w, v);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const double c = sys.mass_inner(w, b);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * b[i];
            }
        const double bnorm = std::sqrt(std::max(0.0, sys.mass_inner(w, w)));
        const int m = int(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        theta = es.eigenvalues()(m - 1);
        resid = bnorm * std::abs(es.eigenvectors()(m - 1, m - 1)) / std::max(std::abs(theta), 1e-300);
        const bool stalled = prev >= 0 && std::abs(theta - prev) <= 1e-12 * std::abs(theta);
        if (resid < rel_tol || bnorm <= 1e-14 * std::abs(theta) || (stalled && resid < 1e2 * rel_tol))
            break;
        prev = theta;
        beta.push_back(bnorm);
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / bnorm;
    }
    return {theta, std::min(it, max_iter), resid};
}

/// dt_max = 2 / sqrt(lambda_max).
template <LeapfrogSystem S>
double stable_dt(const S& sys) {
    const auto r = lanczos_lambda_max(sys);
    if (!(r.lambda_max > 0.0)) throw UnstableTimestep("operator has no positive spectrum");
    return 2.0 / std::sqrt(r.lambda_max);
}

template <LeapfrogSystem S>
class Leapfrog {
public:
    Leapfrog(const S& sys, Vec q, Vec v, double t, double dt, double dt_max)
        : sys_(sys), q_(std::move(q)), v_(std::move(v)), t_(t), dt_(dt) {
        check_timestep(dt, dt_max);
        if (q_.size() != sys_.dim() || v_.size() != sys_.dim())
            throw GridMismatch("initial data does not match the system dimension");
        a_.resize(sys_.dim());
        sys_.acceleration(q_, t_, a_);
    }

    void step() {
        const std::size_t n = q_.size();
        const double h = 0.5 * dt_;
        for (std::size_t i = 0; i < n; ++i) {
            v_[i] += h * a_[i];
            q_[i] += dt_ * v_[i];
        }
        t_ += dt_;
        sys_.acceleration(q_, t_, a_);
        for (std::size_t i = 0; i < n; ++i) v_[i] += h * a_[i];
    }

    EnergyRecord energy() const {
        const EnergyParts u = sys_.potential(q_);
        const double kin = 0.5 * sys_.mass_inner(v_, v_) - dt_ * dt_ / 8.0 * sys_.mass_inner(a_, a_);
        return {t_, kin, u.elastic, u.micro, u.curvature};
    }

    const Vec& q() const { return q_; }
    const Vec& v() const { return v_; }
    const Vec& a() const { return a_; }
    double t() const { return t_; }
    double dt() const { return dt_; }

private:
    const S& sys_;
    Vec q_, v_, a_;
    double t_;
    double dt_;
};

struct RunResult {
    Vec q, v;
    double t;
    EnergyTrace trace;
    // max over records of (||w(t)|| - ||w0||) / int_0^t ||F||, with ||w|| = sqrt(2E);
    // zero when there is no forcing.
    double forcing_bound_factor = 0.0;
};

/// Observer receives (step index, integrator) every `stride` steps.
template <LeapfrogSystem S>
using Observer = std::function<void(std::size_t, const Leapfrog<S>&)>;

template <LeapfrogSystem S>
RunResult run_leapfrog(const S& sys, Vec q0, Vec v0, double t0, double dt, double dt_max, std::size_t steps,
                       std::size_t stride = 1, const Observer<S>& observer = {}) {
    if (stride == 0) stride = 1;
    Leapfrog<S> lf(sys, std::move(q0), std::move(v0), t0, dt, dt_max);
    RunResult r;
    auto record = [&](std::size_t k) {
        r.trace.push_back(lf.energy());
        if (observer) observer(k, lf);
    };
    record(0);
    const double w0 = std::sqrt(std::max(0.0, 2.0 * r.trace.front().total()));
    double forcing_integral = 0.0;
    double f_prev = sys.forcing_norm(t0);
    for (std::size_t k = 1; k <= steps; ++k) {
        lf.step();
        const double f_now = sys.forcing_norm(lf.t());
        forcing_integral += 0.5 * std::abs(dt) * (f_prev + f_now);
        f_prev = f_now;
        if (k % stride == 0 || k == steps) {
            record(k);
            if (forcing_integral > 0.0) {
                const double w = std::sqrt(std::max(0.0, 2.0 * r.trace.back().total()));
                r.forcing_bound_factor = std::max(r.forcing_bound_factor, (w - w0) / forcing_integral);
            }
        }
    }
    r.q = lf.q();
    r.v = lf.v();
    r.t = lf.t();
    return r;
}

/// max_k |E_k - E_0| / |E_0|
inline double relative_energy_drift(const EnergyTrace& tr) {
    if (tr.empty()) return 0.0;
    const double e0 = tr.front().total();
    double d = 0.0;
    for (const auto& r : tr) d = std::max(d, std::abs(r.total() - e0));
    return e0 != 0.0 ? d / std::abs(e0) : d;
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_LEAPFROG_HPP
