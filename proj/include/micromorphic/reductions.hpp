#ifndef MICROMORPHIC_REDUCTIONS_HPP
#define MICROMORPHIC_REDUCTIONS_HPP

// Coefficient maps to neighbouring models and native reduced systems:
//   Cosserat     P = A = anti(theta)        (tensor form on A, vector form on theta)
//   Microstretch P = zeta 1 + anti(theta)
//   Microvoid    P = zeta 1
//   Microstrain  P = S in Sym(3), stored as 6 Mandel coordinates

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/dynamics.hpp"
#include "micromorphic/grid.hpp"
#include "micromorphic/leapfrog.hpp"

namespace micromorphic {

struct CurvatureAlphas {
    double alpha1, alpha2, alpha3;
};

// ---------------------------------------------------------------------------
// Eringen-Claus: m = a3 tr(X) 1 + 2 a1 skew X + (a2 - a3) X^T

inline CurvatureAlphas map_eringen_claus(double a1, double a2, double a3) {
    return {a2 - a3, a2 - a3 - 2 * a1, (2 * a3 + a2) / 3.0};
}

struct EringenClausCoefficients {
    double a1, a2, a3;
};

inline EringenClausCoefficients eringen_claus_from_alphas(const CurvatureAlphas& a) {
    const double a3 = a.alpha3 - a.alpha1 / 3.0;
    return {(a.alpha1 - a.alpha2) / 2.0, a.alpha1 + a3, a3};
}

inline Tensor2 eringen_claus_moment(double a1, double a2, double a3, const Tensor2& X) {
    return a3 * tr(X) * Tensor2::identity() + 2 * a1 * skew(X) + (a2 - a3) * transpose(X);
}

// ---------------------------------------------------------------------------
// Popov-Kroener

inline void require_poisson(double mu, double nu) {
    if (!(nu > -1.0 && nu < 0.5)) {
        std::ostringstream os;
        os << "Poisson ratio nu = " << nu << " outside (-1, 1/2)";
        throw PoissonOutOfRange(os.str());
    }
    if (!(mu > 0.0)) throw InadmissibleParams("Popov-Kroener mapping needs μ > 0, value " + std::to_string(mu));
}

inline CurvatureAlphas map_popov_kroener(double mu, double d, double nu) {
    require_poisson(mu, nu);
    const double c = mu * (2 * d) * (2 * d) / 24.0;
    return {3 * c, c * (3 + 4 * nu / (1 - nu)), 0.0};
}

/// Coefficients of a1 ||X||^2 + a2 <X, X^T> + a3 tr(X)^2 in the dislocation energy.
struct QuadFormCoefficients3 {
    double a1, a2, a3;
};

inline QuadFormCoefficients3 popov_kroener_quadform(double mu, double d, double nu) {
    require_poisson(mu, nu);
    const double c = mu * (2 * d) * (2 * d) / 24.0;
    return {c * (3 + 2 * nu / (1 - nu)), -c * 2 * nu / (1 - nu), -c};
}

// ---------------------------------------------------------------------------
// Cowin-Nunziato microvoids

struct CowinNunziato {
    double mu_v, lambda_v, alpha_v, b_v, xi_v;
};

inline CowinNunziato map_cowin_nunziato(const MaterialParams& p) {
    MaterialParams q = p;
    q.variant = Variant::Microvoid;
    require_admissible(q);
    const double b = -(2 * p.mu_e + 3 * p.lambda_e) / 3.0;
    return {p.mu_e, p.lambda_e, 2.0 * p.alpha2 / 3.0, b, -3 * b + 2 * p.mu_h + 3 * p.lambda_h};
}

inline AdmissibilityReport cowin_nunziato_positivity(const CowinNunziato& c) {
    AdmissibilityReport r{Variant::Microvoid, {}};
    auto pos = [&](const char* name, double v) { r.items.push_back({name, v, v > 0.0}); };
    pos("μv > 0", c.mu_v);
    pos("2μv+3λv > 0", 2 * c.mu_v + 3 * c.lambda_v);
    pos("αv > 0", c.alpha_v);
    pos("ξv > 0", c.xi_v);
    pos("(2μv+3λv)ξv − 3bv² > 0", (2 * c.mu_v + 3 * c.lambda_v) * c.xi_v - 3 * c.b_v * c.b_v);
    return r;
}

// ---------------------------------------------------------------------------
// Teisseyre / Einstein choice

inline std::pair<double, double> teisseyre_einstein(double alpha3) { return {-6 * alpha3, 6 * alpha3}; }

inline MaterialParams with_einstein_choice(MaterialParams p) {
    std::tie(p.alpha1, p.alpha2) = teisseyre_einstein(p.alpha3);
    return p;
}

/// Curl m(P) with the relaxed moment law alpha1 devsym + alpha2 skew + alpha3 sph.
inline TensorField curl_moment(const MaterialParams& p, const TensorField& P) {
    MaterialParams q = p;
    q.variant = Variant::Relaxed;
    const TensorField X = Curl(P);
    return Curl(map_tensor(X, [&](const Tensor2& x) { return moment_stress(x, q); }));
}

/// ||skew Curl m(P)|| / ||Curl m(P)||; the relaxed m is the transpose of the
/// Eringen-Claus moment, so this is the skew part of Curl(m_EC^T).
inline double symmetry_residual(const MaterialParams& p, const TensorField& P) {
    const TensorField c = curl_moment(p, P);
    const TensorField s = map_tensor(c, [](const Tensor2& x) { return skew(x); });
    const double n = l2_norm(c);
    return n > 0.0 ? l2_norm(s) / n : 0.0;
}

inline constexpr double kSymmetryTolerance = 1e-9;

inline bool check_symmetry(const MaterialParams& p, const TensorField& P) {
    return symmetry_residual(p, P) < kSymmetryTolerance;
}

// ---------------------------------------------------------------------------
// Nye's formula

struct NyeResiduals {
    double curl_form;     // -Curl A = (grad axl A)^T - tr[(grad axl A)^T] 1
    double gradient_form; // grad axl A = -(Curl A)^T + 1/2 tr[(Curl A)^T] 1
    double round_trip;    // Curl A rebuilt through both formulas
};

inline VectorField axl_field(const TensorField& A) {
    const double scale = A.max_abs();
    VectorField w(A.grid());
    for (std::size_t i = 0; i < A.nodes(); ++i) {
        const Tensor2 a = A.tensor(i);
        const double s = norm(sym(a));
        if (s > kSkewTolerance * std::max(scale, norm(a))) {
            std::ostringstream os;
            os << "field is not skew at node " << i << ", ||sym A|| = " << s;
            throw NonSkewField(os.str());
        }
        w.set(i, axl_of_skew_part(a));
    }
    return w;
}

inline TensorField anti_field(const VectorField& w) {
    TensorField a(w.grid());
    for (std::size_t i = 0; i < w.nodes(); ++i) a.set(i, anti(w.vec(i)));
    return a;
}

inline NyeResiduals nye_identities(const TensorField& A) {
    const VectorField w = axl_field(A);
    const TensorField G = Grad(w);
    const TensorField C = Curl(A);
    const TensorField lhs1 = -C;
    const TensorField rhs1 = map_tensor(G, [](const Tensor2& g) {
        return transpose(g) - tr(g) * Tensor2::identity();
    });
    const TensorField rhs2 = map_tensor(C, [](const Tensor2& c) {
        return -transpose(c) + 0.5 * tr(c) * Tensor2::identity();
    });
    const TensorField back = map_tensor(rhs2, [](const Tensor2& g) {
        return -(transpose(g) - tr(g) * Tensor2::identity());
    });
    const double scale = std::max({l2_norm(C), l2_norm(G), 1e-300});
    const bool zero = l2_norm(C) == 0.0 && l2_norm(G) == 0.0;
    if (zero) return {0.0, 0.0, 0.0};
    return {l2_norm(lhs1 - rhs1) / scale, l2_norm(G - rhs2) / scale, l2_norm(back - C) / scale};
}

// ---------------------------------------------------------------------------
// Reduced systems

namespace detail {

/// Block layout of a reduced state with per-component masses.
class BlockSystem {
public:
    BlockSystem(const MaterialParams& p, const Grid& g, Forcing F, std::vector<double> masses)
        : p_(p), g_(g), F_(std::move(F)), mass_(std::move(masses)) {
        for (auto& m : mass_) m *= p.rho;
    }

    const MaterialParams& params() const { return p_; }
    const Grid& grid() const { return g_; }
    std::size_t dim() const { return mass_.size() * g_.nodes(); }

    double mass_inner(const Vec& a, const Vec& b) const {
        const std::size_t n = g_.nodes();
        double s = 0.0;
        for (std::size_t c = 0; c < mass_.size(); ++c) {
            double t = 0.0;
            for (std::size_t i = c * n; i < (c + 1) * n; ++i) t += a[i] * b[i];
            s += mass_[c] * t;
        }
        return s * g_.cell_volume();
    }
    double forcing_norm(double t) const {
        if (!F_.active()) return 0.0;
        VectorField f(g_);
        TensorField M(g_);
        F_.eval(t, f, M);
        return std::sqrt(inner(f, f) + inner(M, M));
    }

    template <std::size_t N>
    Field<N> block(const Vec& q, std::size_t first) const {
        const std::size_t n = g_.nodes();
        return Field<N>(g_, Vec(q.begin() + first * n, q.begin() + (first + N) * n));
    }
    template <std::size_t N>
    void put(Vec& q, std::size_t first, const Field<N>& f) const {
        require_same_grid(f.grid(), g_);
        std::copy(f.data().begin(), f.data().end(), q.begin() + first * g_.nodes());
    }
    /// a = force / mass
    void scale_by_mass(Vec& a) const {
        const std::size_t n = g_.nodes();
        for (std::size_t c = 0; c < mass_.size(); ++c)
            for (std::size_t i = c * n; i < (c + 1) * n; ++i) a[i] /= mass_[c];
    }
    bool forced() const { return F_.active(); }
    void forcing(double t, VectorField& f, TensorField& M) const {
        if (F_.active()) F_.eval(t, f, M);
    }

protected:
    MaterialParams p_;
    Grid g_;
    Forcing F_;
    std::vector<double> mass_;
};

inline MaterialParams law(const MaterialParams& p, Variant v) {
    MaterialParams q = p;
    q.variant = v;
    return q;
}

/// Div[alpha1/2 devsym grad th + alpha2/2 skew grad th + 2 alpha3 div th 1] * 2,
/// i.e. the force of the theta curvature energy; also returns the energy.
inline std::pair<VectorField, double> theta_curvature(const VectorField& th, const MaterialParams& p) {
    const TensorField G = Grad(th);
    TensorField S(th.grid());
    double e = 0.0;
    for (std::size_t i = 0; i < th.nodes(); ++i) {
        const Tensor2 g = G.tensor(i);
        const Tensor2 s = p.alpha1 * devsym(g) + p.alpha2 * skew(g) + 4 * p.alpha3 * tr(g) * Tensor2::identity();
        S.set(i, s);
        e += 0.5 * inner(s, g);
    }
    return {Div(S), e * th.grid().cell_volume()};
}

}  // namespace detail

/// Cosserat tensor form on (u, A), A skew:
///   u_tt = Div sigma + f,  A_tt = skew(-Curl m + sigma + M).
class CosseratTensorSystem : public detail::BlockSystem {
public:
    CosseratTensorSystem(const MaterialParams& p, const Grid& g, Forcing F = Forcing::none())
        : BlockSystem(p, g, std::move(F), std::vector<double>(12, 1.0)) {
        require_admissible(detail::law(p, Variant::Cosserat));
    }

    Vec pack(const VectorField& u, const TensorField& A) const {
        Vec q(dim());
        put(q, 0, u);
        put(q, 3, A);
        return q;
    }
    std::pair<VectorField, TensorField> unpack(const Vec& q) const { return {block<3>(q, 0), block<9>(q, 3)}; }

    void acceleration(const Vec& q, double t, Vec& a) const {
        auto [u, A] = unpack(q);
        VectorField fu(g_);
        TensorField fA(g_);
        forces(u, A, fu, fA);
        if (forced()) {
            VectorField f(g_);
            TensorField M(g_);
            forcing(t, f, M);
            fu += f;
            fA += map_tensor(M, [](const Tensor2& x) { return skew(x); });
        }
        a = pack(fu, fA);
        scale_by_mass(a);
    }
    void acceleration_free(const Vec& q, Vec& a) const {
        auto [u, A] = unpack(q);
        VectorField fu(g_);
        TensorField fA(g_);
        forces(u, A, fu, fA);
        a = pack(fu, fA);
        scale_by_mass(a);
    }
    EnergyParts potential(const Vec& q) const {
        auto [u, A] = unpack(q);
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u), X = Curl(A);
        EnergyParts e;
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            const Tensor2 el = gu.tensor(i) - A.tensor(i), x = X.tensor(i);
            e.elastic += 0.5 * inner(force_stress(el, m), el);
            e.curvature += 0.5 * inner(moment_stress(x, m), x);
        }
        e *= g_.cell_volume();
        return e;
    }

private:
    void forces(const VectorField& u, const TensorField& A, VectorField& fu, TensorField& fA) const {
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u), X = Curl(A);
        TensorField sigma(g_), mom(g_);
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            sigma.set(i, force_stress(gu.tensor(i) - A.tensor(i), m));
            mom.set(i, moment_stress(X.tensor(i), m));
        }
        fu = Div(sigma);
        fA = map_tensor(sigma - Curl(mom), [](const Tensor2& x) { return skew(x); });
    }
};

/// Cosserat vector form on (u, theta), kinetic mass 2 for theta:
///   theta_tt = Div[alpha1/2 devsym grad th + alpha2/2 skew grad th + 2 alpha3 div th 1]
///              + 2 mu_c (axl skew grad u - th) + axl skew M
class CosseratVectorSystem : public detail::BlockSystem {
public:
    CosseratVectorSystem(const MaterialParams& p, const Grid& g, Forcing F = Forcing::none())
        : BlockSystem(p, g, std::move(F), {1, 1, 1, 2, 2, 2}) {
        require_admissible(detail::law(p, Variant::Cosserat));
    }

    Vec pack(const VectorField& u, const VectorField& th) const {
        Vec q(dim());
        put(q, 0, u);
        put(q, 3, th);
        return q;
    }
    std::pair<VectorField, VectorField> unpack(const Vec& q) const { return {block<3>(q, 0), block<3>(q, 3)}; }

    void acceleration(const Vec& q, double t, Vec& a) const {
        auto [u, th] = unpack(q);
        VectorField fu(g_), ft(g_);
        forces(u, th, fu, ft);
        if (forced()) {
            VectorField f(g_);
            TensorField M(g_);
            forcing(t, f, M);
            fu += f;
            for (std::size_t i = 0; i < g_.nodes(); ++i) ft.set(i, ft.vec(i) + 2.0 * axl_of_skew_part(M.tensor(i)));
        }
        a = pack(fu, ft);
        scale_by_mass(a);
    }
    void acceleration_free(const Vec& q, Vec& a) const {
        auto [u, th] = unpack(q);
        VectorField fu(g_), ft(g_);
        forces(u, th, fu, ft);
        a = pack(fu, ft);
        scale_by_mass(a);
    }
    EnergyParts potential(const Vec& q) const {
        auto [u, th] = unpack(q);
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u);
        EnergyParts e;
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            const Tensor2 el = gu.tensor(i) - anti(th.vec(i));
            e.elastic += 0.5 * inner(force_stress(el, m), el);
        }
        e.elastic *= g_.cell_volume();
        e.curvature = detail::theta_curvature(th, p_).second;
        return e;
    }

private:
    void forces(const VectorField& u, const VectorField& th, VectorField& fu, VectorField& ft) const {
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u);
        TensorField sigma(g_);
        for (std::size_t i = 0; i < g_.nodes(); ++i) sigma.set(i, force_stress(gu.tensor(i) - anti(th.vec(i)), m));
        fu = Div(sigma);
        ft = detail::theta_curvature(th, p_).first;
        for (std::size_t i = 0; i < g_.nodes(); ++i)
            ft.set(i, ft.vec(i) + 2.0 * axl_of_skew_part(sigma.tensor(i)));
    }
};

/// Microstretch on (u, theta, zeta) with masses (1, 2, 3):
///   zeta_tt = 2/3 alpha2 Lap zeta + (2mu_e+3lambda_e)/3 div u
///             - (2mu_e+3lambda_e+2mu_h+3lambda_h) zeta + tr(M)/3
/// and the theta equation of the Cosserat vector form with P = zeta 1 + anti(theta).
class MicrostretchSystem : public detail::BlockSystem {
public:
    MicrostretchSystem(const MaterialParams& p, const Grid& g, Forcing F = Forcing::none())
        : BlockSystem(p, g, std::move(F), {1, 1, 1, 2, 2, 2, 3}) {
        require_admissible(detail::law(p, Variant::Microstretch));
    }

    Vec pack(const VectorField& u, const VectorField& th, const ScalarField& z) const {
        Vec q(dim());
        put(q, 0, u);
        put(q, 3, th);
        put(q, 6, z);
        return q;
    }
    std::tuple<VectorField, VectorField, ScalarField> unpack(const Vec& q) const {
        return {block<3>(q, 0), block<3>(q, 3), block<1>(q, 6)};
    }

    void acceleration(const Vec& q, double t, Vec& a) const {
        auto [u, th, z] = unpack(q);
        VectorField fu(g_), ft(g_);
        ScalarField fz(g_);
        forces(u, th, z, fu, ft, fz);
        if (forced()) {
            VectorField f(g_);
            TensorField M(g_);
            forcing(t, f, M);
            fu += f;
            for (std::size_t i = 0; i < g_.nodes(); ++i) {
                const Tensor2 Mi = M.tensor(i);
                ft.set(i, ft.vec(i) + 2.0 * axl_of_skew_part(Mi));
                fz(0, i) += tr(Mi);
            }
        }
        a = pack(fu, ft, fz);
        scale_by_mass(a);
    }
    void acceleration_free(const Vec& q, Vec& a) const {
        auto [u, th, z] = unpack(q);
        VectorField fu(g_), ft(g_);
        ScalarField fz(g_);
        forces(u, th, z, fu, ft, fz);
        a = pack(fu, ft, fz);
        scale_by_mass(a);
    }
    EnergyParts potential(const Vec& q) const {
        auto [u, th, z] = unpack(q);
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u);
        const double kh = 2 * p_.mu_h + 3 * p_.lambda_h;
        EnergyParts e;
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            const double zi = z(0, i);
            const Tensor2 el = gu.tensor(i) - zi * Tensor2::identity() - anti(th.vec(i));
            e.elastic += 0.5 * inner(force_stress(el, m), el);
            e.micro += 1.5 * kh * zi * zi;
        }
        const VectorField gz = grad(z);
        e.curvature = p_.alpha2 * inner(gz, gz) / g_.cell_volume();
        e *= g_.cell_volume();
        e.curvature += detail::theta_curvature(th, p_).second;
        return e;
    }

private:
    void forces(const VectorField& u, const VectorField& th, const ScalarField& z, VectorField& fu, VectorField& ft,
                ScalarField& fz) const {
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u);
        const double kh = 2 * p_.mu_h + 3 * p_.lambda_h;
        TensorField sigma(g_);
        for (std::size_t i = 0; i < g_.nodes(); ++i)
            sigma.set(i, force_stress(gu.tensor(i) - z(0, i) * Tensor2::identity() - anti(th.vec(i)), m));
        fu = Div(sigma);
        ft = detail::theta_curvature(th, p_).first;
        fz = laplacian(z);
        fz *= 2 * p_.alpha2;
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            const Tensor2 s = sigma.tensor(i);
            ft.set(i, ft.vec(i) + 2.0 * axl_of_skew_part(s));
            fz(0, i) += tr(s) - 3 * kh * z(0, i);
        }
    }
};

/// Microvoid on (u, zeta), mass 3 for zeta; the zeta equation of the
/// microstretch system.
class MicrovoidSystem : public detail::BlockSystem {
public:
    MicrovoidSystem(const MaterialParams& p, const Grid& g, Forcing F = Forcing::none())
        : BlockSystem(p, g, std::move(F), {1, 1, 1, 3}) {
        require_admissible(detail::law(p, Variant::Microvoid));
    }

    Vec pack(const VectorField& u, const ScalarField& z) const {
        Vec q(dim());
        put(q, 0, u);
        put(q, 3, z);
        return q;
    }
    std::pair<VectorField, ScalarField> unpack(const Vec& q) const { return {block<3>(q, 0), block<1>(q, 3)}; }

    void acceleration(const Vec& q, double t, Vec& a) const {
        auto [u, z] = unpack(q);
        VectorField fu(g_);
        ScalarField fz(g_);
        forces(u, z, fu, fz);
        if (forced()) {
            VectorField f(g_);
            TensorField M(g_);
            forcing(t, f, M);
            fu += f;
            for (std::size_t i = 0; i < g_.nodes(); ++i) fz(0, i) += tr(M.tensor(i));
        }
        a = pack(fu, fz);
        scale_by_mass(a);
    }
    void acceleration_free(const Vec& q, Vec& a) const {
        auto [u, z] = unpack(q);
        VectorField fu(g_);
        ScalarField fz(g_);
        forces(u, z, fu, fz);
        a = pack(fu, fz);
        scale_by_mass(a);
    }
    EnergyParts potential(const Vec& q) const {
        auto [u, z] = unpack(q);
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u);
        const double kh = 2 * p_.mu_h + 3 * p_.lambda_h;
        EnergyParts e;
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            const double zi = z(0, i);
            const Tensor2 el = gu.tensor(i) - zi * Tensor2::identity();
            e.elastic += 0.5 * inner(force_stress(el, m), el);
            e.micro += 1.5 * kh * zi * zi;
        }
        e *= g_.cell_volume();
        const VectorField gz = grad(z);
        e.curvature = p_.alpha2 * inner(gz, gz);
        return e;
    }

    /// zeta acceleration for given (u, zeta), unforced.
    ScalarField zeta_acceleration(const VectorField& u, const ScalarField& z) const {
        VectorField fu(g_);
        ScalarField fz(g_);
        forces(u, z, fu, fz);
        fz *= 1.0 / mass_[3];
        return fz;
    }

private:
    void forces(const VectorField& u, const ScalarField& z, VectorField& fu, ScalarField& fz) const {
        const MaterialParams m = detail::law(p_, Variant::Relaxed);
        const TensorField gu = Grad(u);
        const double kh = 2 * p_.mu_h + 3 * p_.lambda_h;
        TensorField sigma(g_);
        for (std::size_t i = 0; i < g_.nodes(); ++i)
            sigma.set(i, force_stress(gu.tensor(i) - z(0, i) * Tensor2::identity(), m));
        fu = Div(sigma);
        fz = laplacian(z);
        fz *= 2 * p_.alpha2;
        for (std::size_t i = 0; i < g_.nodes(); ++i) fz(0, i) += tr(sigma.tensor(i)) - 3 * kh * z(0, i);
    }
};

/// Mandel coordinates <-> symmetric tensor fields.
inline Field<6> to_mandel(const TensorField& S) {
    Field<6> m(S.grid());
    const auto& B = mandel_basis();
    for (std::size_t i = 0; i < S.nodes(); ++i) {
        const Tensor2 s = S.tensor(i);
        for (std::size_t a = 0; a < 6; ++a) m(a, i) = inner(B[a], s);
    }
    return m;
}

inline TensorField from_mandel(const Field<6>& m) {
    TensorField S(m.grid());
    const auto& B = mandel_basis();
    for (std::size_t i = 0; i < m.nodes(); ++i) {
        Tensor2 s;
        for (std::size_t a = 0; a < 6; ++a) s += m(a, i) * B[a];
        S.set(i, s);
    }
    return S;
}

/// Microstrain on (u, S), S symmetric:
///   u_tt = Div sigma + f,  sigma = 2 mu_e sym(grad u - S) + lambda_e tr(grad u - S) 1
///   S_tt = sym(-Curl m(Curl S) + sigma - s + M)          (dislocation form)
///   S_tt = alpha1 Lap S + sym(sigma - s + M)             (gradient form)
class MicrostrainSystem : public detail::BlockSystem {
public:
    MicrostrainSystem(const MaterialParams& p, const Grid& g, Forcing F = Forcing::none())
        : BlockSystem(p, g, std::move(F), std::vector<double>(9, 1.0)) {
        require_admissible(detail::law(p, Variant::Microstrain));
        p_.variant = Variant::Microstrain;
    }

    Vec pack(const VectorField& u, const TensorField& S) const {
        Vec q(dim());
        put(q, 0, u);
        put(q, 3, to_mandel(S));
        return q;
    }
    std::pair<VectorField, TensorField> unpack(const Vec& q) const {
        return {block<3>(q, 0), from_mandel(block<6>(q, 3))};
    }

    void acceleration(const Vec& q, double t, Vec& a) const {
        auto [u, S] = unpack(q);
        VectorField fu(g_);
        TensorField fS(g_);
        forces(u, S, fu, fS);
        if (forced()) {
            VectorField f(g_);
            TensorField M(g_);
            forcing(t, f, M);
            fu += f;
            fS += M;
        }
        a = pack(fu, fS);  // Mandel projection symmetrizes
        scale_by_mass(a);
    }
    void acceleration_free(const Vec& q, Vec& a) const {
        auto [u, S] = unpack(q);
        VectorField fu(g_);
        TensorField fS(g_);
        forces(u, S, fu, fS);
        a = pack(fu, fS);
        scale_by_mass(a);
    }
    EnergyParts potential(const Vec& q) const {
        auto [u, S] = unpack(q);
        const TensorField gu = Grad(u);
        const TensorField X = p_.microstrain_gradient ? TensorField(g_) : Curl(S);
        EnergyParts e;
        for (std::size_t i = 0; i < g_.nodes(); ++i) e += energy_parts_unchecked(gu.tensor(i), S.tensor(i), X.tensor(i), p_);
        if (p_.microstrain_gradient) {
            const GradTensorField gs = Grad(S);
            double s = 0.0;
            for (double x : gs.data()) s += x * x;
            e.curvature = 0.5 * p_.alpha1 * s;
        }
        e *= g_.cell_volume();
        return e;
    }

private:
    void forces(const VectorField& u, const TensorField& S, VectorField& fu, TensorField& fS) const {
        const TensorField gu = Grad(u);
        const bool gradient = p_.microstrain_gradient;
        const TensorField X = gradient ? TensorField(g_) : Curl(S);
        TensorField sigma(g_), rest(g_), m(g_);
        for (std::size_t i = 0; i < g_.nodes(); ++i) {
            const auto st = stresses_unchecked(gu.tensor(i), S.tensor(i), X.tensor(i), p_);
            sigma.set(i, st.sigma);
            rest.set(i, st.sigma - st.s);
            m.set(i, st.m);
        }
        fu = Div(sigma);
        fS = std::move(rest);
        if (gradient) fS.axpy(p_.alpha1, laplacian(S));
        else fS -= Curl(m);
    }
};

/// Integrates a reduced system; dt_max defaults to the Lanczos estimate.
template <LeapfrogSystem S>
RunResult run_reduced(const S& sys, Vec q0, Vec v0, double dt, std::size_t n_steps, std::size_t stride = 1,
                      double dt_max = 0.0) {
    if (dt_max <= 0.0) dt_max = stable_dt(sys);
    return run_leapfrog(sys, std::move(q0), std::move(v0), 0.0, dt, dt_max, n_steps, stride);
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_REDUCTIONS_HPP
