#ifndef MICROMORPHIC_CONSTITUTIVE_HPP
#define MICROMORPHIC_CONSTITUTIVE_HPP

// Isotropic parameter sets, stresses and energy densities for the model
// family, fourth-order tensors in an orthonormal tensor basis, admissibility
// reports and the series homogenization law.
//
// Pointwise laws are templated on the scalar so the same code assembles the
// complex plane-wave symbol.

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "micromorphic/error.hpp"
#include "micromorphic/tensor.hpp"

namespace micromorphic {

enum class Variant {
    Relaxed,
    FurtherRelaxedDevDev,
    EringenClaus,
    ClassicalMindlinEringen,
    Microstrain,
    Cosserat,
    Microstretch,
    Microvoid,
    PopovKroener,
    TeisseyreEinstein,
};

inline constexpr std::array<std::pair<Variant, const char*>, 10> kVariantNames{{
    {Variant::Relaxed, "Relaxed"},
    {Variant::FurtherRelaxedDevDev, "FurtherRelaxedDevDev"},
    {Variant::EringenClaus, "EringenClaus"},
    {Variant::ClassicalMindlinEringen, "ClassicalMindlinEringen"},
    {Variant::Microstrain, "Microstrain"},
    {Variant::Cosserat, "Cosserat"},
    {Variant::Microstretch, "Microstretch"},
    {Variant::Microvoid, "Microvoid"},
    {Variant::PopovKroener, "PopovKroener"},
    {Variant::TeisseyreEinstein, "TeisseyreEinstein"},
}};

inline std::string to_string(Variant v) {
    for (const auto& [k, name] : kVariantNames)
        if (k == v) return name;
    return "?";
}

inline Variant parse_variant(const std::string& s) {
    for (const auto& [k, name] : kVariantNames)
        if (s == name) return k;
    throw ConfigError("unknown variant '" + s + "'");
}

struct MaterialParams {
    double mu_e = 1.0;
    double lambda_e = 0.0;
    double mu_c = 0.0;
    double mu_h = 1.0;
    double lambda_h = 0.0;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double alpha3 = 1.0;
    double rho = 1.0;
    Variant variant = Variant::Relaxed;
    // Microstrain only: curvature on grad(sym P) instead of Curl(sym P).
    bool microstrain_gradient = false;
};

/// Variants whose unknowns are the full (u, P) pair.
inline bool is_full_variant(Variant v) {
    switch (v) {
        case Variant::Relaxed:
        case Variant::FurtherRelaxedDevDev:
        case Variant::EringenClaus:
        case Variant::ClassicalMindlinEringen:
        case Variant::PopovKroener:
        case Variant::TeisseyreEinstein:
            return true;
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------
// Admissibility

struct Inequality {
    std::string name;  // e.g. "2μe+3λe > 0"
    double value;      // left-hand side
    bool passed;
};

struct AdmissibilityReport {
    Variant variant;
    std::vector<Inequality> items;

    bool ok() const {
        for (const auto& i : items)
            if (!i.passed) return false;
        return true;
    }
    std::vector<std::string> failures() const {
        std::vector<std::string> f;
        for (const auto& i : items)
            if (!i.passed) f.push_back(i.name);
        return f;
    }
    std::string summary() const {
        std::ostringstream os;
        for (const auto& i : items) os << (i.passed ? "PASS " : "FAIL ") << i.name << "  (" << i.value << ")\n";
        return os.str();
    }
};

inline AdmissibilityReport check_admissible(const MaterialParams& p) {
    AdmissibilityReport r{p.variant, {}};
    auto pos = [&](const char* name, double v) { r.items.push_back({name, v, v > 0.0}); };
    auto nonneg = [&](const char* name, double v) { r.items.push_back({name, v, v >= 0.0}); };
    auto equal = [&](const char* name, double lhs, double rhs) {
        const double d = lhs - rhs;
        r.items.push_back({name, d, std::abs(d) <= 1e-12 * std::max(1.0, std::abs(rhs))});
    };
    const double ke = 2 * p.mu_e + 3 * p.lambda_e;
    const double kh = 2 * p.mu_h + 3 * p.lambda_h;
    pos("μe > 0", p.mu_e);
    pos("2μe+3λe > 0", ke);
    switch (p.variant) {
        case Variant::Relaxed:
            pos("μh > 0", p.mu_h);
            pos("2μh+3λh > 0", kh);
            pos("α1 > 0", p.alpha1);
            pos("α2 > 0", p.alpha2);
            pos("α3 > 0", p.alpha3);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::EringenClaus:
            pos("μh > 0", p.mu_h);
            pos("2μh+3λh > 0", kh);
            pos("α1 > 0", p.alpha1);
            pos("α2 > 0", p.alpha2);
            pos("α3 > 0", p.alpha3);
            pos("μc > 0", p.mu_c);
            break;
        case Variant::FurtherRelaxedDevDev:
            pos("μh > 0", p.mu_h);
            pos("α1 > 0", p.alpha1);
            pos("α2 > 0", p.alpha2);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::PopovKroener:
            pos("α1 > 0", p.alpha1);
            pos("α2 > 0", p.alpha2);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::ClassicalMindlinEringen:
            pos("μh > 0", p.mu_h);
            pos("2μh+3λh > 0", kh);
            pos("α1 > 0", p.alpha1);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::Microstrain:
            pos("μh > 0", p.mu_h);
            pos("2μh+3λh > 0", kh);
            pos("α1 > 0", p.alpha1);
            if (!p.microstrain_gradient) pos("α2 > 0", p.alpha2);
            break;
        case Variant::Cosserat:
            pos("α1 > 0", p.alpha1);
            pos("α2 > 0", p.alpha2);
            pos("α3 > 0", p.alpha3);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::Microstretch:
            pos("2μh+3λh > 0", kh);
            pos("α1 > 0", p.alpha1);
            pos("α2 > 0", p.alpha2);
            pos("α3 > 0", p.alpha3);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::Microvoid:
            pos("2μh+3λh > 0", kh);
            pos("α2 > 0", p.alpha2);
            nonneg("μc ≥ 0", p.mu_c);
            break;
        case Variant::TeisseyreEinstein:
            pos("μh > 0", p.mu_h);
            pos("2μh+3λh > 0", kh);
            equal("α1 = −6α3", p.alpha1, -6 * p.alpha3);
            equal("α2 = 6α3", p.alpha2, 6 * p.alpha3);
            nonneg("μc ≥ 0", p.mu_c);
            break;
    }
    return r;
}

inline void require_admissible(const MaterialParams& p) {
    const auto r = check_admissible(p);
    if (!r.ok()) {
        std::ostringstream os;
        os << "variant " << to_string(p.variant) << " violates";
        for (const auto& i : r.items)
            if (!i.passed) os << " [" << i.name << ", value " << i.value << "]";
        throw InadmissibleParams(os.str());
    }
}

// ---------------------------------------------------------------------------
// Pointwise constitutive laws

template <class T>
struct StressSetT {
    Mat3<T> sigma;  // force stress, conjugate to e = grad u - P
    Mat3<T> s;      // microstress, conjugate to P
    Mat3<T> m;      // moment stress, conjugate to Curl P
};
using StressSet = StressSetT<double>;

inline bool has_couple_modulus(Variant v) {
    return v != Variant::Microstrain;
}

/// sigma = 2 mu_e sym e + 2 mu_c skew e + lambda_e tr(e) 1
template <class T>
Mat3<T> force_stress(const Mat3<T>& e, const MaterialParams& p) {
    Mat3<T> r = T(2 * p.mu_e) * sym(e) + T(p.lambda_e) * tr(e) * Mat3<T>::identity();
    if (has_couple_modulus(p.variant) && p.mu_c != 0.0) r += T(2 * p.mu_c) * skew(e);
    return r;
}

template <class T>
Mat3<T> micro_stress(const Mat3<T>& P, const MaterialParams& p) {
    switch (p.variant) {
        case Variant::FurtherRelaxedDevDev:
            return T(2 * p.mu_h) * devsym(P);
        case Variant::PopovKroener:
        case Variant::Cosserat:
            return Mat3<T>::zero();
        default:
            return T(2 * p.mu_h) * sym(P) + T(p.lambda_h) * tr(P) * Mat3<T>::identity();
    }
}

/// m = alpha1 devsym X + alpha2 skew X + alpha3 tr(X) 1, X = Curl P.
/// The further-relaxed family has no spherical term. The classical variant
/// curves grad P instead and has no moment stress on Curl P.
template <class T>
Mat3<T> moment_stress(const Mat3<T>& X, const MaterialParams& p) {
    switch (p.variant) {
        case Variant::ClassicalMindlinEringen:
            return Mat3<T>::zero();
        case Variant::FurtherRelaxedDevDev:
        case Variant::PopovKroener:
            return T(p.alpha1) * devsym(X) + T(p.alpha2) * skew(X);
        default:
            return T(p.alpha1) * devsym(X) + T(p.alpha2) * skew(X) +
                   T(p.alpha3) * tr(X) * Mat3<T>::identity();
    }
}

template <class T>
StressSetT<T> stresses_unchecked(const Mat3<T>& gradu, const Mat3<T>& P, const Mat3<T>& curlP,
                                 const MaterialParams& p) {
    return {force_stress(gradu - P, p), micro_stress(P, p), moment_stress(curlP, p)};
}

/// sigma, s, m at one point. Throws InadmissibleParams.
inline StressSet stresses_relaxed(const Tensor2& gradu, const Tensor2& P, const Tensor2& curlP,
                                  const MaterialParams& p) {
    require_admissible(p);
    return stresses_unchecked(gradu, P, curlP, p);
}

struct EnergyParts {
    double elastic = 0.0;    // force-stress part
    double micro = 0.0;      // microstress part
    double curvature = 0.0;  // moment-stress part
    double total() const { return elastic + micro + curvature; }
    EnergyParts& operator+=(const EnergyParts& o) {
        elastic += o.elastic;
        micro += o.micro;
        curvature += o.curvature;
        return *this;
    }
    EnergyParts& operator*=(double s) {
        elastic *= s;
        micro *= s;
        curvature *= s;
        return *this;
    }
};

/// Every law is a self-adjoint linear map, so each part is half the product
/// of a stress with its conjugate strain.
inline EnergyParts energy_parts_unchecked(const Tensor2& gradu, const Tensor2& P, const Tensor2& curlP,
                                          const MaterialParams& p) {
    const Tensor2 e = gradu - P;
    const auto st = stresses_unchecked(gradu, P, curlP, p);
    return {0.5 * inner(st.sigma, e), 0.5 * inner(st.s, P), 0.5 * inner(st.m, curlP)};
}

inline double energy_density(const Tensor2& gradu, const Tensor2& P, const Tensor2& curlP,
                             const MaterialParams& p) {
    require_admissible(p);
    return energy_parts_unchecked(gradu, P, curlP, p).total();
}

/// Curvature energy 1/2 alpha1 ||grad P||^2 of the classical variant;
/// gradP[3*c + a] = d_a P_c.
inline double classical_curvature_density(const std::array<double, 27>& gradP, const MaterialParams& p) {
    double s = 0.0;
    for (double x : gradP) s += x * x;
    return 0.5 * p.alpha1 * s;
}

inline double kinetic_density(const Vector3& udot, const Tensor2& Pdot, double rho = 1.0) {
    return 0.5 * rho * (norm2(udot) + norm2(Pdot));
}

// ---------------------------------------------------------------------------
// Fourth-order tensors

enum class TensorDomain { Sym, Full };

/// Orthonormal Mandel basis of Sym(3).
inline const std::array<Tensor2, 6>& mandel_basis() {
    static const std::array<Tensor2, 6> b = [] {
        std::array<Tensor2, 6> r;
        const double s = 1.0 / std::sqrt(2.0);
        r[0] = Tensor2::unit(0, 0);
        r[1] = Tensor2::unit(1, 1);
        r[2] = Tensor2::unit(2, 2);
        r[3] = s * (Tensor2::unit(1, 2) + Tensor2::unit(2, 1));
        r[4] = s * (Tensor2::unit(0, 2) + Tensor2::unit(2, 0));
        r[5] = s * (Tensor2::unit(0, 1) + Tensor2::unit(1, 0));
        return r;
    }();
    return b;
}

inline const std::array<Tensor2, 9>& full_basis() {
    static const std::array<Tensor2, 9> b = [] {
        std::array<Tensor2, 9> r;
        for (std::size_t k = 0; k < 9; ++k) r[k] = Tensor2::unit(k / 3, k % 3);
        return r;
    }();
    return b;
}

class ElasticityTensor {
public:
    enum class Kind { IsotropicSym, IsotropicFull, Anisotropic };

    /// X -> 2 mu X + lambda tr(X) 1 on Sym(3).
    static ElasticityTensor isotropic_sym(double mu, double lambda) {
        return from_map(Kind::IsotropicSym, TensorDomain::Sym, [&](const Tensor2& x) {
            return 2 * mu * x + lambda * tr(x) * Tensor2::identity();
        });
    }
    /// X -> c_devsym devsym X + c_skew skew X + c_sph tr(X) 1 on R^{3x3},
    /// so <C.X, X> = c_devsym ||devsym X||^2 + c_skew ||skew X||^2 + c_sph tr(X)^2.
    static ElasticityTensor isotropic_full(double c_devsym, double c_skew, double c_sph) {
        return from_map(Kind::IsotropicFull, TensorDomain::Full, [&](const Tensor2& x) {
            return c_devsym * devsym(x) + c_skew * skew(x) + c_sph * tr(x) * Tensor2::identity();
        });
    }
    static ElasticityTensor anisotropic(const Eigen::MatrixXd& m) {
        TensorDomain d;
        if (m.rows() == 6 && m.cols() == 6) d = TensorDomain::Sym;
        else if (m.rows() == 9 && m.cols() == 9) d = TensorDomain::Full;
        else throw DomainViolation("anisotropic tensor matrix must be 6x6 or 9x9");
        const double asym = (m - m.transpose()).norm();
        if (asym > 1e-12 * std::max(1.0, m.norm()))
            throw DomainViolation("anisotropic tensor matrix lacks major symmetry, ||C - C^T|| = " +
                                  std::to_string(asym));
        return ElasticityTensor(Kind::Anisotropic, d, 0.5 * (m + m.transpose()));
    }
    /// The semidefinite 9x9 extension X -> C.sym X of a Sym-domain tensor.
    static ElasticityTensor embed_full(const ElasticityTensor& c) {
        if (c.domain_ != TensorDomain::Sym) return c;
        return from_map(Kind::Anisotropic, TensorDomain::Full,
                        [&](const Tensor2& x) { return c.apply(sym(x)); });
    }

    Kind kind() const { return kind_; }
    TensorDomain domain() const { return domain_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    bool has_minor_symmetry() const { return domain_ == TensorDomain::Sym; }

    Tensor2 apply(const Tensor2& x) const {
        if (domain_ == TensorDomain::Sym) {
            const double a = norm(skew(x));
            if (a > 1e-12 * norm(x))
                throw DomainViolation("tensor acts on Sym(3) but input has ||skew X|| = " + std::to_string(a));
            const auto& b = mandel_basis();
            Eigen::VectorXd c(6);
            for (int i = 0; i < 6; ++i) c[i] = inner(b[i], x);
            const Eigen::VectorXd y = matrix_ * c;
            Tensor2 r;
            for (int i = 0; i < 6; ++i) r += y[i] * b[i];
            return r;
        }
        Eigen::VectorXd c(9);
        for (int i = 0; i < 9; ++i) c[i] = x[i];
        const Eigen::VectorXd y = matrix_ * c;
        Tensor2 r;
        for (int i = 0; i < 9; ++i) r[i] = y[i];
        return r;
    }

    /// Extreme eigenvalues on the tensor's domain.
    std::pair<double, double> definiteness() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_, Eigen::EigenvaluesOnly);
        return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
    }
    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

private:
    ElasticityTensor(Kind k, TensorDomain d, Eigen::MatrixXd m) : kind_(k), domain_(d), matrix_(std::move(m)) {}

    template <class F>
    static ElasticityTensor from_map(Kind k, TensorDomain d, F&& f) {
        const int n = d == TensorDomain::Sym ? 6 : 9;
        Eigen::MatrixXd m(n, n);
        for (int j = 0; j < n; ++j) {
            const Tensor2 col = f(d == TensorDomain::Sym ? mandel_basis()[j] : full_basis()[j]);
            for (int i = 0; i < n; ++i)
                m(i, j) = inner(d == TensorDomain::Sym ? mandel_basis()[i] : full_basis()[i], col);
        }
        return ElasticityTensor(k, d, m);
    }

    Kind kind_;
    TensorDomain domain_;
    Eigen::MatrixXd matrix_;
};

inline Tensor2 apply_tensor(const ElasticityTensor& c, const Tensor2& x) { return c.apply(x); }
inline std::pair<double, double> definiteness(const ElasticityTensor& c) { return c.definiteness(); }

/// C_e, H and L_c of an isotropic parameter set.
inline ElasticityTensor elasticity_C(const MaterialParams& p) {
    return ElasticityTensor::isotropic_sym(p.mu_e, p.lambda_e);
}
inline ElasticityTensor elasticity_H(const MaterialParams& p) {
    return ElasticityTensor::isotropic_sym(p.mu_h, p.lambda_h);
}
inline ElasticityTensor curvature_L(const MaterialParams& p) {
    return ElasticityTensor::isotropic_full(p.alpha1, p.alpha2, p.alpha3);
}

// ---------------------------------------------------------------------------
// Homogenization

struct EffectiveModuli {
    double mu;
    double bulk;  // 2 mu + 3 lambda
    double lambda() const { return (bulk - 2 * mu) / 3.0; }
};

/// Series law: mu = mu_e mu_h / (mu_e + mu_h), likewise for 2 mu + 3 lambda.
inline EffectiveModuli homogenized_moduli(const MaterialParams& p) {
    const double ke = 2 * p.mu_e + 3 * p.lambda_e;
    const double kh = 2 * p.mu_h + 3 * p.lambda_h;
    if (p.mu_e + p.mu_h == 0.0) throw DegenerateParams("mu_e + mu_h = 0");
    if (ke + kh == 0.0) throw DegenerateParams("(2mu_e+3lambda_e) + (2mu_h+3lambda_h) = 0");
    return {p.mu_e * p.mu_h / (p.mu_e + p.mu_h), ke * kh / (ke + kh)};
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_CONSTITUTIVE_HPP
