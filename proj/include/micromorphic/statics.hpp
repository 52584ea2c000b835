#ifndef MICROMORPHIC_STATICS_HPP
#define MICROMORPHIC_STATICS_HPP

// Static equilibrium as matrix-free quadratic minimization,
//   E(x) = 1/2 <K x, x> - <b, x>,
// with K the (negated) force operator of the dynamics. Conjugate gradients
// run on the complement of the known constant-field kernel.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/dynamics.hpp"
#include "micromorphic/grid.hpp"

namespace micromorphic {

struct CgRecord {
    std::size_t iter;
    double residual;  // relative
    double energy;
};

struct CgOptions {
    double tol = 1e-8;
    bool jacobi = true;
    std::size_t max_iter = 0;  // 0: 50 sqrt(dim)
};

struct CgResult {
    Vec x;
    double residual = 0.0;
    std::size_t iterations = 0;
    double energy = 0.0;
    std::vector<CgRecord> trace;
};

namespace detail {

inline double dotv(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Removes the components along an orthonormal basis.
inline void project_out(Vec& x, const std::vector<Vec>& kernel) {
    for (const auto& k : kernel) {
        const double c = dotv(x, k);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * k[i];
    }
}

}  // namespace detail

/// Preconditioned CG for K x = b with K symmetric positive definite on the
/// orthogonal complement of `kernel`. Energies are scaled by `volume_weight`.
inline CgResult conjugate_gradient(const std::function<void(const Vec&, Vec&)>& K, const Vec& b, Vec x0,
                                   const std::vector<Vec>& kernel, const Vec* diag, const CgOptions& opt,
                                   double volume_weight = 1.0) {
    const std::size_t n = b.size();
    const std::size_t cap = opt.max_iter ? opt.max_iter : std::size_t(50.0 * std::sqrt(double(n)));
    Vec x = x0.empty() ? Vec(n, 0.0) : std::move(x0);
    detail::project_out(x, kernel);
    Vec r(n), Kx(n), z(n), p(n), Kp(n);
    K(x, Kx);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Kx[i];
    detail::project_out(r, kernel);
    const double bnorm = std::sqrt(detail::dotv(b, b));
    const double ref = bnorm > 0.0 ? bnorm : std::max(std::sqrt(detail::dotv(r, r)), 1e-300);
    auto energy = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s -= 0.5 * x[i] * (b[i] + r[i]);
        return s * volume_weight;
    };
    auto precondition = [&] {
        for (std::size_t i = 0; i < n; ++i) z[i] = diag ? r[i] / (*diag)[i] : r[i];
        detail::project_out(z, kernel);
    };
    CgResult res;
    double rel = std::sqrt(detail::dotv(r, r)) / ref;
    res.trace.push_back({0, rel, energy()});
    if (bnorm == 0.0 && rel == 0.0) {
        res.x = std::move(x);
        res.energy = res.trace.back().energy;
        return res;
    }
    precondition();
    p = z;
    double rz = detail::dotv(r, z);
    std::size_t it = 0;
    while (rel >= opt.tol) {
        if (it >= cap) {
            std::ostringstream os;
            os << "conjugate gradients stopped after " << it << " iterations at relative residual " << rel;
            throw NoConvergence(os.str());
        }
        ++it;
        K(p, Kp);
        const double pKp = detail::dotv(p, Kp);
        if (!(pKp > 0.0)) {
            std::ostringstream os;
            os << "search direction with <p, Kp> = " << pKp << " (operator not positive on the gauge complement)";
            throw SingularProblem(os.str());
        }
        const double a = rz / pKp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += a * p[i];
            r[i] -= a * Kp[i];
        }
        detail::project_out(r, kernel);
        rel = std::sqrt(detail::dotv(r, r)) / ref;
        res.trace.push_back({it, rel, energy()});
        precondition();
        const double rz_new = detail::dotv(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // true residual of the final iterate
    K(x, Kx);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Kx[i];
    detail::project_out(r, kernel);
    res.residual = std::sqrt(detail::dotv(r, r)) / ref;
    res.iterations = it;
    res.energy = energy();
    res.x = std::move(x);
    return res;
}

/// Diagonal of a translation-invariant operator on `components` fields of
/// `nodes` nodes, read off the response to a unit impulse per component.
inline Vec impulse_diagonal(const std::function<void(const Vec&, Vec&)>& K, std::size_t components,
                            std::size_t nodes) {
    Vec d(components * nodes), e(components * nodes, 0.0), Ke;
    for (std::size_t c = 0; c < components; ++c) {
        e[c * nodes] = 1.0;
        K(e, Ke);
        e[c * nodes] = 0.0;
        const double v = Ke[c * nodes];
        if (!(v > 0.0)) throw SingularProblem("nonpositive operator diagonal in component " + std::to_string(c));
        std::fill(d.begin() + c * nodes, d.begin() + (c + 1) * nodes, v);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Relaxed static problem

struct StaticProblem {
    MaterialParams params;
    VectorField f;  // body force
    TensorField M;  // body moment
};

struct StaticSolution {
    VectorField u;
    TensorField P;
    double residual;
    std::size_t iterations;
    double energy;
    std::vector<CgRecord> trace;
};

namespace detail {

/// Orthonormal constant-field kernel: constant u, and constant P in the
/// null space of the local P-P stiffness.
inline std::vector<Vec> relaxed_kernel(const MaterialParams& p, const Grid& g) {
    const std::size_t n = g.nodes();
    std::vector<Vec> ker;
    const double c = 1.0 / std::sqrt(double(n));
    for (std::size_t comp = 0; comp < 3; ++comp) {
        Vec k(12 * n, 0.0);
        std::fill(k.begin() + comp * n, k.begin() + (comp + 1) * n, c);
        ker.push_back(std::move(k));
    }
    Eigen::Matrix<double, 9, 9> H;
    for (int j = 0; j < 9; ++j) {
        const Tensor2 E = Tensor2::unit(j / 3, j % 3);
        const auto st = stresses_unchecked(Tensor2::zero(), E, Tensor2::zero(), p);
        const Tensor2 col = st.s - st.sigma;  // d^2 W / dP^2 applied to E
        for (int i = 0; i < 9; ++i) H(i, j) = col[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(H);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < 9; ++i) {
        if (std::abs(es.eigenvalues()[i]) > 1e-12 * scale) continue;
        Vec k(12 * n, 0.0);
        for (std::size_t comp = 0; comp < 9; ++comp)
            std::fill(k.begin() + (3 + comp) * n, k.begin() + (4 + comp) * n, c * es.eigenvectors()(comp, i));
        ker.push_back(std::move(k));
    }
    return ker;
}

inline void require_orthogonal_to_kernel(const Vec& b, const std::vector<Vec>& ker, std::size_t nodes) {
    const double bn = std::sqrt(dotv(b, b));
    for (std::size_t i = 0; i < ker.size(); ++i) {
        const double c = dotv(b, ker[i]);
        if (std::abs(c) > 1e-10 * std::max(bn, 1e-300) && std::abs(c) > 1e-14) {
            std::ostringstream os;
            os << "forcing has mean " << c / std::sqrt(double(nodes)) << " along zero-energy mode " << i
               << (i < 3 ? " (constant displacement u" + std::to_string(i + 1) + ")" : " (constant micro-distortion)");
            throw SingularProblem(os.str());
        }
    }
}

}  // namespace detail

/// Discrete energy of (u, P) minus the forcing work.
inline double static_energy(const StaticProblem& prob, const VectorField& u, const TensorField& P) {
    const double w = inner(prob.f, u) + inner(prob.M, P);
    return detail::full_potential(u, P, prob.params).total() - w;
}

struct StaticGuess {
    VectorField u;
    TensorField P;
};

inline StaticSolution solve_static_relaxed(const StaticProblem& prob, const CgOptions& opt = {},
                                           const std::optional<StaticGuess>& guess = std::nullopt) {
    const MaterialParams& p = prob.params;
    require_admissible(p);
    if (!is_full_variant(p.variant)) throw InadmissibleParams("static solver needs a (u, P) variant");
    const Grid& g = prob.f.grid();
    require_same_grid(g, prob.M.grid());
    const FullSystem sys(p, g);
    const std::size_t n = g.nodes();
    const auto K = [&](const Vec& x, Vec& y) {
        auto [u, P] = sys.unpack(x);
        auto f = detail::full_forces(u, P, p);
        y = sys.pack(f.u_acc, f.P_acc);
        for (auto& v : y) v = -v;
    };
    const Vec b = sys.pack(prob.f, prob.M);
    const auto ker = detail::relaxed_kernel(p, g);
    detail::require_orthogonal_to_kernel(b, ker, n);
    Vec diag;
    if (opt.jacobi) diag = impulse_diagonal(K, 12, n);
    Vec x0 = guess ? sys.pack(guess->u, guess->P) : Vec{};
    auto r = conjugate_gradient(K, b, std::move(x0), ker, opt.jacobi ? &diag : nullptr, opt, g.cell_volume());
    auto [u, P] = sys.unpack(r.x);
    return {std::move(u), std::move(P), r.residual, r.iterations, r.energy, std::move(r.trace)};
}

/// Euler-Lagrange residual ||K x - b|| / ||b|| on the gauge complement.
inline double static_residual(const StaticProblem& prob, const VectorField& u, const TensorField& P) {
    auto f = detail::full_forces(u, P, prob.params);
    f.u_acc += prob.f;
    f.P_acc += prob.M;
    const double bn = std::sqrt(inner(prob.f, prob.f) + inner(prob.M, prob.M));
    // constant-mode components are gauge; remove the u mean
    const auto m = mean(f.u_acc);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < u.nodes(); ++i) f.u_acc(c, i) -= m[c];
    const double rn = std::sqrt(inner(f.u_acc, f.u_acc) + inner(f.P_acc, f.P_acc));
    return bn > 0.0 ? rn / bn : rn;
}

// ---------------------------------------------------------------------------
// Lazar gauge problem
//
//   min  int mu_e ||sym b||^2 + mu_c ||skew b||^2 + lambda_e/2 tr(b)^2
//          + 1/2 (alpha1 ||devsym Curl b||^2 + alpha2 ||skew Curl b||^2
//                 + alpha3 tr(Curl b)^2) - <sigma0, b>
//   Euler-Lagrange:  Curl m(Curl b) + C~ b = sigma0

struct LazarProblem {
    MaterialParams params;  // mu_e, lambda_e, mu_c, alpha1..3 are used
    TensorField sigma0;
    std::optional<VectorField> f;  // body force balancing Div sigma0
};

struct LazarSolution {
    TensorField beta;
    double residual;
    std::size_t iterations;
    double energy;
    std::vector<CgRecord> trace;
};

namespace detail {

inline MaterialParams lazar_law(const MaterialParams& p) {
    MaterialParams q = p;
    q.variant = Variant::Relaxed;
    return q;
}

inline void require_lazar_params(const MaterialParams& p) {
    std::ostringstream os;
    if (!(p.mu_c > 0.0)) os << " [μc > 0, value " << p.mu_c << "]";
    if (!(p.mu_e > 0.0)) os << " [μe > 0, value " << p.mu_e << "]";
    if (!(2 * p.mu_e + 3 * p.lambda_e > 0.0)) os << " [2μe+3λe > 0, value " << 2 * p.mu_e + 3 * p.lambda_e << "]";
    if (!(p.alpha1 > 0.0)) os << " [α1 > 0, value " << p.alpha1 << "]";
    if (!(p.alpha2 > 0.0)) os << " [α2 > 0, value " << p.alpha2 << "]";
    if (!(p.alpha3 > 0.0)) os << " [α3 > 0, value " << p.alpha3 << "]";
    if (!os.str().empty()) throw InadmissibleParams("Lazar problem violates" + os.str());
}

/// K beta = Curl m(Curl beta) + C~ beta
inline TensorField lazar_operator(const TensorField& beta, const MaterialParams& p) {
    const MaterialParams q = lazar_law(p);
    const TensorField X = Curl(beta);
    TensorField m(beta.grid()), c(beta.grid());
    for (std::size_t i = 0; i < beta.nodes(); ++i) {
        m.set(i, moment_stress(X.tensor(i), q));
        c.set(i, force_stress(beta.tensor(i), q));
    }
    return Curl(m) + c;
}

}  // namespace detail

inline double lazar_energy(const LazarProblem& prob, const TensorField& beta) {
    const MaterialParams q = detail::lazar_law(prob.params);
    const TensorField X = Curl(beta);
    double s = 0.0;
    for (std::size_t i = 0; i < beta.nodes(); ++i) {
        const Tensor2 b = beta.tensor(i), x = X.tensor(i);
        s += 0.5 * inner(force_stress(b, q), b) + 0.5 * inner(moment_stress(x, q), x);
    }
    return s * beta.grid().cell_volume() - inner(prob.sigma0, beta);
}

/// dE/dbeta per node, including the cell volume.
inline TensorField lazar_gradient(const LazarProblem& prob, const TensorField& beta) {
    TensorField g = detail::lazar_operator(beta, prob.params) - prob.sigma0;
    g *= beta.grid().cell_volume();
    return g;
}

/// ||sigma0 - Curl m - C~ beta|| / ||sigma0||
inline double lazar_residual(const LazarProblem& prob, const TensorField& beta) {
    const TensorField r = prob.sigma0 - detail::lazar_operator(beta, prob.params);
    const double s = l2_norm(prob.sigma0);
    return s > 0.0 ? l2_norm(r) / s : l2_norm(r);
}

inline constexpr double kEquilibriumTolerance = 1e-8;

inline LazarSolution solve_lazar(const LazarProblem& prob, const CgOptions& opt = {},
                                 const std::optional<TensorField>& guess = std::nullopt) {
    const MaterialParams& p = prob.params;
    detail::require_lazar_params(p);
    const Grid& g = prob.sigma0.grid();
    {
        VectorField bal = Div(prob.sigma0);
        if (prob.f) bal += *prob.f;
        const double scale = std::max(1.0, l2_norm(prob.sigma0));
        if (l2_norm(bal) > kEquilibriumTolerance * scale) {
            std::ostringstream os;
            os << "background stress is not balanced: ||Div sigma0 + f|| = " << l2_norm(bal);
            throw DomainViolation(os.str());
        }
    }
    const std::size_t n = g.nodes();
    const auto K = [&](const Vec& x, Vec& y) {
        y = detail::lazar_operator(TensorField(g, x), p).data();
    };
    Vec diag;
    if (opt.jacobi) diag = impulse_diagonal(K, 9, n);
    Vec x0 = guess ? guess->data() : Vec{};
    auto r = conjugate_gradient(K, prob.sigma0.data(), std::move(x0), {}, opt.jacobi ? &diag : nullptr, opt,
                                g.cell_volume());
    TensorField beta(g, std::move(r.x));
    return {std::move(beta), r.residual, r.iterations, r.energy, std::move(r.trace)};
}

/// Constant minimizer for constant sigma0: the local 9x9 system C~ beta = sigma0.
inline Tensor2 lazar_constant_solution(const MaterialParams& p, const Tensor2& sigma0) {
    const MaterialParams q = detail::lazar_law(p);
    Eigen::Matrix<double, 9, 9> C;
    for (int j = 0; j < 9; ++j) {
        const Tensor2 col = force_stress(Tensor2::unit(j / 3, j % 3), q);
        for (int i = 0; i < 9; ++i) C(i, j) = col[i];
    }
    Eigen::Matrix<double, 9, 1> rhs;
    for (int i = 0; i < 9; ++i) rhs[i] = sigma0[i];
    const Eigen::Matrix<double, 9, 1> x = C.fullPivLu().solve(rhs);
    Tensor2 b;
    for (int i = 0; i < 9; ++i) b[i] = x[i];
    return b;
}

// ---------------------------------------------------------------------------
// Homogenization

namespace detail {

/// Minimizes W(eps, P, 0) over constant P; returns (P*, W*).
inline std::pair<Tensor2, double> minimize_constant_P(const MaterialParams& p, const Tensor2& eps) {
    Eigen::Matrix<double, 9, 9> H;
    for (int j = 0; j < 9; ++j) {
        const auto st = stresses_unchecked(Tensor2::zero(), Tensor2::unit(j / 3, j % 3), Tensor2::zero(), p);
        const Tensor2 col = st.s - st.sigma;
        for (int i = 0; i < 9; ++i) H(i, j) = col[i];
    }
    // dW/dP = H P - sigma(eps)
    const Tensor2 se = force_stress(eps, p);
    Eigen::Matrix<double, 9, 1> rhs;
    for (int i = 0; i < 9; ++i) rhs[i] = se[i];
    const Eigen::Matrix<double, 9, 1> x = H.completeOrthogonalDecomposition().solve(rhs);
    Tensor2 P;
    for (int i = 0; i < 9; ++i) P[i] = x[i];
    return {P, energy_parts_unchecked(eps, P, Tensor2::zero(), p).total()};
}

}  // namespace detail

/// Optimal constant micro-distortion under the macroscopic strain eps.
inline Tensor2 optimal_micro_distortion(const MaterialParams& p, const Tensor2& eps) {
    require_admissible(p);
    return detail::minimize_constant_P(p, eps).first;
}

struct HomogenizationResult {
    double mu_eff;
    double bulk_eff;  // 2 mu + 3 lambda
    Eigen::Matrix<double, 6, 6> C_eff;  // Mandel basis
};

/// Effective Mandel stiffness from six unit loadings (and their pairwise
/// sums), each minimized over constant P.
inline HomogenizationResult homogenization_check(const MaterialParams& p) {
    require_admissible(p);
    const auto& B = mandel_basis();
    auto W = [&](const Tensor2& e) { return detail::minimize_constant_P(p, e).second; };
    Eigen::Matrix<double, 6, 6> C;
    std::array<double, 6> wd;
    for (int a = 0; a < 6; ++a) wd[a] = W(B[a]);
    for (int a = 0; a < 6; ++a) {
        C(a, a) = 2.0 * wd[a];
        for (int b = a + 1; b < 6; ++b) C(a, b) = C(b, a) = W(B[a] + B[b]) - wd[a] - wd[b];
    }
    const double s3 = 1.0 / std::sqrt(3.0);
    Eigen::Matrix<double, 6, 1> one;
    one << s3, s3, s3, 0, 0, 0;
    const double bulk = one.dot(C * one);
    const double mu = (C(3, 3) + C(4, 4) + C(5, 5)) / 6.0;
    return {mu, bulk, C};
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_STATICS_HPP
