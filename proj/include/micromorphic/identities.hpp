#ifndef MICROMORPHIC_IDENTITIES_HPP
#define MICROMORPHIC_IDENTITIES_HPP

// Machine-checked tensor-calculus identities, items a) to q). Trigonometric
// (band-limited random) fields go through the spectral backend; polynomial
// fields go through fd2 at interior nodes where central differences are
// exact.

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/grid.hpp"
#include "micromorphic/reductions.hpp"
#include "micromorphic/tensor.hpp"

namespace micromorphic {

struct IdentityCheck {
    std::string item;  // "a", "b", ...
    std::string name;
    double residual;
    double tolerance;
    bool expect_violation;  // witness of an inequality: passes when residual > tolerance
    bool passed() const { return expect_violation ? residual > tolerance : residual < tolerance; }
};

inline constexpr double kSpectralIdentityTolerance = 1e-10;
inline constexpr double kStencilIdentityTolerance = 1e-12;
inline constexpr double kWitnessThreshold = 1e-3;

namespace detail {

inline double relative(double diff, double scale) { return scale > 0.0 ? diff / scale : diff; }

template <std::size_t N>
double rel_diff(const Field<N>& a, const Field<N>& b) {
    return relative(l2_norm(a - b), std::max(l2_norm(a), l2_norm(b)));
}

inline TensorField transpose_field(const TensorField& x) {
    return map_tensor(x, [](const Tensor2& t) { return transpose(t); });
}
inline TensorField sym_field(const TensorField& x) {
    return map_tensor(x, [](const Tensor2& t) { return sym(t); });
}
inline TensorField skew_field(const TensorField& x) {
    return map_tensor(x, [](const Tensor2& t) { return skew(t); });
}
inline ScalarField trace_field(const TensorField& x) {
    ScalarField r(x.grid());
    for (std::size_t i = 0; i < x.nodes(); ++i) r(0, i) = tr(x.tensor(i));
    return r;
}
inline TensorField spherical_field(const ScalarField& z) {
    TensorField r(z.grid());
    for (std::size_t i = 0; i < z.nodes(); ++i) r.set(i, z(0, i) * Tensor2::identity());
    return r;
}
/// axl of the skew part, node by node
inline VectorField axl_skew_field(const TensorField& x) {
    VectorField r(x.grid());
    for (std::size_t i = 0; i < x.nodes(); ++i) r.set(i, axl_of_skew_part(x.tensor(i)));
    return r;
}
inline TensorField inc(const TensorField& S) { return Curl(transpose_field(Curl(S))); }

/// Hessian H_ab = d_a d_b zeta.
inline TensorField hessian(const ScalarField& z) { return Grad(grad(z)); }

/// max |a - b| over nodes at least `margin` away from the seam, relative to max |b|.
template <std::size_t N>
double interior_rel_diff(const Field<N>& a, const Field<N>& b, int margin) {
    double d = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.nodes(); ++i) {
        if (!is_interior(a.grid(), i, margin)) continue;
        for (std::size_t c = 0; c < N; ++c) {
            d = std::max(d, std::abs(a(c, i) - b(c, i)));
            s = std::max(s, std::abs(b(c, i)));
        }
    }
    return relative(d, s);
}

inline Tensor2 curl_zeta_one_matrix(const Vector3& g) {
    Tensor2 r;
    r(0, 1) = g[2];
    r(0, 2) = -g[1];
    r(1, 0) = -g[2];
    r(1, 2) = g[0];
    r(2, 0) = g[1];
    r(2, 1) = -g[0];
    return r;
}

inline Tensor2 curl_curl_zeta_one_matrix(const Tensor2& H) {
    Tensor2 r = H;
    r(0, 0) = -(H(1, 1) + H(2, 2));
    r(1, 1) = -(H(0, 0) + H(2, 2));
    r(2, 2) = -(H(0, 0) + H(1, 1));
    return r;
}

}  // namespace detail

/// Runs items a) to q). n is the grid size for both backends.
inline std::vector<IdentityCheck> identity_suite(int n = 16, std::uint64_t seed = 42) {
    using namespace detail;
    std::mt19937_64 rng(seed);
    const Grid gs(n, Backend::spectral);
    const Grid gf(n, Backend::fd2);
    const double ts = kSpectralIdentityTolerance, tf = kStencilIdentityTolerance;
    std::vector<IdentityCheck> out;
    auto add = [&](const char* item, std::string name, double r, double tol, bool witness = false) {
        out.push_back({item, std::move(name), r, tol, witness});
    };

    const TensorField A = random_skew(gs, rng);
    const TensorField S = random_symmetric(gs, rng);
    const TensorField P = random_band_limited<9>(gs, rng);
    const VectorField u = random_band_limited<3>(gs, rng);
    const ScalarField zeta = random_band_limited<1>(gs, rng);

    // a)
    {
        const auto r = nye_identities(A);
        add("a", "-Curl A = (grad axl A)^T - tr[(grad axl A)^T] 1", r.curl_form, ts);
        add("a", "grad axl A = -(Curl A)^T + 1/2 tr[(Curl A)^T] 1", r.gradient_form, ts);
        add("a", "both formulas in sequence return Curl A", r.round_trip, ts);
    }
    // b) trigonometric and polynomial
    {
        const VectorField gz = grad(zeta);
        const TensorField c1 = curl_of_scalar_identity(zeta);
        const TensorField c1_direct = Curl(spherical_field(zeta));
        TensorField m1(gs), m2(gs);
        const TensorField H = hessian(zeta);
        for (std::size_t i = 0; i < gs.nodes(); ++i) {
            m1.set(i, curl_zeta_one_matrix(gz.vec(i)));
            m2.set(i, curl_curl_zeta_one_matrix(H.tensor(i)));
        }
        const TensorField cc = Curl(c1_direct);
        add("b", "Curl(zeta 1) matrix, spectral", rel_diff(c1_direct, m1), ts);
        add("b", "Curl(zeta 1) = -anti(grad zeta), spectral", rel_diff(c1, c1_direct), ts);
        add("b", "Curl(zeta 1) in so(3), spectral", relative(l2_norm(sym_field(c1_direct)), l2_norm(c1_direct)), ts);
        add("b", "Curl Curl(zeta 1) matrix, spectral", rel_diff(cc, m2), ts);
        add("b", "Curl Curl(zeta 1) in Sym(3), spectral", relative(l2_norm(skew_field(cc)), l2_norm(cc)), ts);

        const auto poly = [](const Vector3& x) {
            return 0.3 * x[0] * x[0] - 0.7 * x[1] * x[1] + 0.2 * x[2] * x[2] + 0.5 * x[0] * x[1] - 0.4 * x[1] * x[2] +
                   0.9 * x[0] * x[2] + x[0] - 2.0 * x[1] + 0.5 * x[2];
        };
        const ScalarField zp = sample<1>(gf, poly);
        const TensorField cp = Curl(spherical_field(zp));
        const VectorField gp = sample<3>(gf, [](const Vector3& x) {
            return Vector3{{0.6 * x[0] + 0.5 * x[1] + 0.9 * x[2] + 1.0, -1.4 * x[1] + 0.5 * x[0] - 0.4 * x[2] - 2.0,
                            0.4 * x[2] - 0.4 * x[1] + 0.9 * x[0] + 0.5}};
        });
        const Tensor2 Hp{{0.6, 0.5, 0.9, 0.5, -1.4, -0.4, 0.9, -0.4, 0.4}};
        TensorField mp1(gf), mp2(gf);
        for (std::size_t i = 0; i < gf.nodes(); ++i) {
            mp1.set(i, curl_zeta_one_matrix(gp.vec(i)));
            mp2.set(i, curl_curl_zeta_one_matrix(Hp));
        }
        add("b", "Curl(zeta 1) matrix, quadratic zeta, fd2", interior_rel_diff(cp, mp1, 1), tf);
        add("b", "Curl Curl(zeta 1) matrix, quadratic zeta, fd2", interior_rel_diff(Curl(cp), mp2, 2), tf);
    }
    // c) coordinate field, fd2 exact stencil
    {
        const TensorField Ax = sample<9>(gf, [](const Vector3& x) { return anti(x); });
        TensorField one(gf), two(gf);
        for (std::size_t i = 0; i < gf.nodes(); ++i) {
            one.set(i, Tensor2::identity());
            two.set(i, 2.0 * Tensor2::identity());
        }
        add("c", "Curl(1/2 anti(x)) = 1, fd2", interior_rel_diff(Curl(0.5 * Ax), one, 1), tf);
        add("c", "Curl anti(x) = 2 * 1, fd2", interior_rel_diff(Curl(Ax), two, 1), tf);
    }
    // d)
    {
        const TensorField c = Curl(S);
        add("d", "tr(Curl S) = 0", relative(l2_norm(trace_field(c)), l2_norm(c)), ts);
    }
    // e), f), g)
    {
        const TensorField e = inc(S);
        add("e", "Curl[(Curl S)^T] in Sym(3)", relative(l2_norm(skew_field(e)), l2_norm(e)), ts);
        const TensorField f = inc(A);
        add("f", "Curl[(Curl A)^T] in so(3)", relative(l2_norm(sym_field(f)), l2_norm(f)), ts);
        const TensorField g1 = inc(sym_field(P)), g2 = inc(skew_field(P));
        add("g", "Curl[(Curl sym P)^T] in Sym(3)", relative(l2_norm(skew_field(g1)), l2_norm(g1)), ts);
        add("g", "Curl[(Curl skew P)^T] in so(3)", relative(l2_norm(sym_field(g2)), l2_norm(g2)), ts);
    }
    // h)
    {
        const TensorField c = Curl(skew_field(Curl(A)));
        add("h", "tr[Curl(skew Curl A)] = 0", relative(l2_norm(trace_field(c)), l2_norm(c)), ts);
    }
    // i)
    {
        const TensorField e = sym_field(Grad(u));
        const double scale = l2_norm(laplacian(e));
        add("i", "inc(sym grad u) = 0", relative(l2_norm(inc(e)), scale), ts);
        add("i", "inc(S) != 0 for a random symmetric S", relative(l2_norm(inc(S)), l2_norm(laplacian(S))),
            kWitnessThreshold, true);
    }
    // j)
    {
        const TensorField gu = Grad(u);
        const TensorField lhs = Grad(axl_skew_field(gu));
        const TensorField rhs = transpose_field(Curl(sym_field(gu)));
        add("j", "grad axl(skew grad u) = [Curl sym grad u]^T", rel_diff(lhs, rhs), ts);
        const TensorField lp = Grad(axl_skew_field(P)), rp = transpose_field(Curl(sym_field(P)));
        add("j", "grad axl(skew P) != [Curl sym P]^T for generic P", rel_diff(lp, rp), kWitnessThreshold, true);
    }
    // k)
    {
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            Tensor2 X;
            for (int c = 0; c < 9; ++c) X[c] = uni(rng);
            const double a1 = uni(rng), a2 = uni(rng), a3 = uni(rng);
            const auto q = quadform_decompose(a1, a2, a3);
            const double lhs = a1 * norm2(X) + a2 * inner(X, transpose(X)) + a3 * tr(X) * tr(X);
            const double rhs = q.c_devsym * norm2(devsym(X)) + q.c_skew * norm2(skew(X)) + q.c_sph * tr(X) * tr(X);
            const double scale = (std::abs(a1) + std::abs(a2) + 3 * std::abs(a3)) * norm2(X);
            worst = std::max(worst, relative(std::abs(lhs - rhs), scale));
        }
        add("k", "quadratic form split into devsym, skew, trace parts", worst, kStencilIdentityTolerance);
    }
    // l), m), n)
    {
        const TensorField Ps = skew_field(P);
        const TensorField C = Curl(Ps);
        const ScalarField trc = trace_field(transpose_field(C));
        const ScalarField dv = div(axl_skew_field(P));
        add("l", "tr[(Curl skew P)^T] = 2 div axl(skew P)", rel_diff(trc, 2.0 * dv), ts);
        const VectorField gdv = grad(dv);
        TensorField anti_gdv(gs);
        for (std::size_t i = 0; i < gs.nodes(); ++i) anti_gdv.set(i, anti(gdv.vec(i)));
        const TensorField ctr = Curl(spherical_field(trc));
        add("l", "Curl{tr[(Curl skew P)^T] 1} = -2 anti grad(div axl skew P)", rel_diff(ctr, -2.0 * anti_gdv), ts);
        const TensorField cct = Curl(transpose_field(C));
        add("m", "Curl{[Curl skew P]^T} = -anti grad(div axl skew P)", rel_diff(cct, -1.0 * anti_gdv), ts);
        add("n", "-2 Curl{[Curl skew P]^T} + Curl{tr[(Curl skew P)^T] 1} = 0",
            relative(l2_norm(-2.0 * cct + ctr), 2.0 * l2_norm(cct) + l2_norm(ctr)), ts);
    }
    // o), p)
    {
        MaterialParams e;
        e.alpha3 = 0.7;
        e = with_einstein_choice(e);
        const TensorField cm = curl_moment(e, P);
        const TensorField rhs = -6.0 * e.alpha3 * inc(sym_field(P));
        add("o", "Einstein choice: Curl m = -6 alpha3 Curl{[Curl sym P]^T}", rel_diff(cm, rhs), ts);
        add("o", "Einstein choice: Curl m in Sym(3) for general P", symmetry_residual(e, P), ts);

        MaterialParams q;
        q.alpha1 = 1.0;
        q.alpha2 = -1.0;
        q.alpha3 = 0.4;
        add("p", "alpha1 = -alpha2: Curl m(S) in Sym(3)", symmetry_residual(q, S), ts);
        q.alpha2 = 1.0;
        add("p", "alpha1 != -alpha2: Curl m(S) not in Sym(3)", symmetry_residual(q, S), kWitnessThreshold, true);
    }
    // q)
    {
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const Vector3 v{{uni(rng), uni(rng), uni(rng)}};
            const Vector3 w{{uni(rng), uni(rng), uni(rng)}};
            const Tensor2 W = anti(w);
            const double lhs = dot(v, axl(W)), rhs = 0.5 * inner(anti(v), W);
            worst = std::max(worst, relative(std::abs(lhs - rhs), norm(v) * norm(w)));
        }
        add("q", "<v, axl W> = 1/2 <anti v, W>", worst, kStencilIdentityTolerance);
    }
    return out;
}

/// One line per check; byte-stable for fixed (n, seed).
inline std::string identity_summary(const std::vector<IdentityCheck>& checks) {
    std::string s;
    char buf[64];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%.3e", c.residual);
        s += c.item + ") " + (c.passed() ? "PASS " : "FAIL ") + c.name + " | residual " + buf;
        std::snprintf(buf, sizeof buf, "%.0e", c.tolerance);
        s += std::string(c.expect_violation ? " > " : " < ") + buf + "\n";
    }
    return s;
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_IDENTITIES_HPP
