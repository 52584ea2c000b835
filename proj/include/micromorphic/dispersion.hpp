#ifndef MICROMORPHIC_DISPERSION_HPP
#define MICROMORPHIC_DISPERSION_HPP

// Plane-wave symbol A(k) of the (u, P) systems: a plane wave
// w e^{i(k.x - omega t)} solves the equations iff A(k) w = omega^2 w.
// Amplitude order: u1, u2, u3, P11, P12, P13, P21, ..., P33.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "micromorphic/constitutive.hpp"
#include "micromorphic/error.hpp"
#include "micromorphic/tensor.hpp"

namespace micromorphic {

using Complex = std::complex<double>;
using SymbolMatrix = Eigen::Matrix<Complex, 12, 12>;
using Amplitude = Eigen::Matrix<Complex, 12, 1>;

struct Symbol {
    Vector3 k;
    SymbolMatrix A;
};

struct AssemblyOptions {
    // Limit parameter sets (e.g. mu_h = 0 or alpha = 0) violate strict
    // inequalities but still define a semidefinite symbol.
    bool check_admissibility = true;
};

namespace detail {

/// Unforced forces of the plane wave e^{i k.x} with amplitude w, per unit amplitude.
inline Amplitude plane_wave_forces(const Vector3& k, const MaterialParams& p, const Amplitude& w) {
    using C3 = Mat3<Complex>;
    const Vec3<Complex> g{{Complex(0, k[0]), Complex(0, k[1]), Complex(0, k[2])}};
    const Vec3<Complex> u{{w[0], w[1], w[2]}};
    C3 P;
    for (int c = 0; c < 9; ++c) P[c] = w[3 + c];
    const C3 K = anti(g);
    const C3 gradu = outer(u, g);
    const bool classical = p.variant == Variant::ClassicalMindlinEringen;
    const C3 X = classical ? C3::zero() : C3(-matmul(P, K));
    const auto st = stresses_unchecked(gradu, P, X, p);
    const Vec3<Complex> fu = matvec(st.sigma, g);
    C3 fP = st.sigma - st.s;
    if (classical) fP += Complex(p.alpha1) * dot(g, g) * P;
    else fP += matmul(st.m, K);  // -Curl m = m . anti(g)
    Amplitude r;
    for (int c = 0; c < 3; ++c) r[c] = fu[c];
    for (int c = 0; c < 9; ++c) r[3 + c] = fP[c];
    return r;
}

}  // namespace detail

inline Symbol assemble_symbol(const Vector3& k, const MaterialParams& p, AssemblyOptions opt = {}) {
    if (!is_full_variant(p.variant))
        throw InadmissibleParams("no (u, P) plane-wave symbol for variant " + to_string(p.variant));
    if (opt.check_admissibility) require_admissible(p);
    Symbol s{k, SymbolMatrix::Zero()};
    for (int j = 0; j < 12; ++j) {
        Amplitude e = Amplitude::Zero();
        e[j] = 1.0;
        s.A.col(j) = -detail::plane_wave_forces(k, p, e) / p.rho;
    }
    const double herm = (s.A - s.A.adjoint()).norm();
    if (herm > 1e-12 * std::max(1.0, s.A.norm())) {
        std::ostringstream os;
        os << "symbol is not Hermitian, ||A - A^H|| = " << herm;
        throw MisassembledSymbol(os.str());
    }
    return s;
}

struct SymbolSpectrum {
    Eigen::Matrix<double, 12, 1> omega2;  // ascending, round-off zeros deflated
    Eigen::Matrix<Complex, 12, 12> vectors;
};

inline constexpr double kDeflationTolerance = 1e-13;
inline constexpr double kNegativeTolerance = 1e-10;

inline SymbolSpectrum symbol_spectrum(const Symbol& s, bool allow_negative = false) {
    const SymbolMatrix H = 0.5 * (s.A + s.A.adjoint());
    Eigen::SelfAdjointEigenSolver<SymbolMatrix> es(H);
    SymbolSpectrum r{es.eigenvalues(), es.eigenvectors()};
    const double scale = std::max(1.0, s.A.norm());
    for (int i = 0; i < 12; ++i) {
        double& w2 = r.omega2[i];
        if (std::abs(w2) <= kDeflationTolerance * scale) w2 = 0.0;
        if (w2 < -kNegativeTolerance * scale && !allow_negative) {
            std::ostringstream os;
            os << "negative omega^2 = " << w2 << " at k = (" << s.k[0] << ", " << s.k[1] << ", " << s.k[2] << ")";
            throw MisassembledSymbol(os.str());
        }
    }
    return r;
}

enum class BranchClass { acoustic, optic, flat };

inline std::string to_string(BranchClass c) {
    switch (c) {
        case BranchClass::acoustic: return "acoustic";
        case BranchClass::optic: return "optic";
        default: return "flat";
    }
}

struct BranchSet {
    Vector3 direction;
    std::vector<double> k;
    // [branch][sample]
    std::vector<std::vector<double>> omega2;
    std::vector<std::vector<double>> omega;
    std::vector<std::vector<double>> u_fraction;  // share of |w|^2 carried by u
    std::vector<BranchClass> classification;
    // Diagnostic sign of the discrete second difference of omega: +1, -1, or 0 when mixed.
    std::vector<int> concavity;
    double max_imag_omega2 = 0.0;  // relative to ||A||

    std::size_t size() const { return omega.size(); }
    std::size_t samples() const { return k.size(); }
    double omega_max() const {
        double m = 0.0;
        for (const auto& b : omega)
            for (double w : b) m = std::max(m, w);
        return m;
    }
};

inline constexpr double kOpticThreshold = 1e-8;
inline constexpr double kSlopeThreshold = 1e-6;

inline BranchSet branches(Vector3 direction, const std::vector<double>& k_samples, const MaterialParams& p,
                          AssemblyOptions opt = {}) {
    if (k_samples.size() < 2) throw InvalidSweep("a sweep needs at least 2 samples");
    for (std::size_t j = 1; j < k_samples.size(); ++j)
        if (!(k_samples[j] > k_samples[j - 1])) throw InvalidSweep("k samples must be strictly increasing");
    const double dn = norm(direction);
    if (!(dn > 0.0)) throw InvalidSweep("direction must be nonzero");
    direction *= 1.0 / dn;

    BranchSet bs;
    bs.direction = direction;
    bs.k = k_samples;
    const std::size_t ns = k_samples.size();
    bs.omega2.assign(12, std::vector<double>(ns));
    bs.omega.assign(12, std::vector<double>(ns));
    bs.u_fraction.assign(12, std::vector<double>(ns));

    Eigen::Matrix<Complex, 12, 12> prev;
    for (std::size_t j = 0; j < ns; ++j) {
        const Symbol s = assemble_symbol(k_samples[j] * direction, p, opt);
        {
            // eigenvalue realness of the unsymmetrized matrix
            Eigen::ComplexEigenSolver<SymbolMatrix> ce(s.A, false);
            const double scale = std::max(1.0, s.A.norm());
            for (int i = 0; i < 12; ++i)
                bs.max_imag_omega2 = std::max(bs.max_imag_omega2, std::abs(ce.eigenvalues()[i].imag()) / scale);
        }
        const auto sp = symbol_spectrum(s);
        // branch b -> eigen index
        std::array<int, 12> assign;
        if (j == 0) {
            for (int b = 0; b < 12; ++b) assign[b] = b;
        } else {
            Eigen::Matrix<double, 12, 12> overlap = (prev.adjoint() * sp.vectors).cwiseAbs();
            std::array<bool, 12> used_b{}, used_e{};
            for (int n = 0; n < 12; ++n) {
                int bb = -1, be = -1;
                double best = -1.0;
                for (int b = 0; b < 12; ++b) {
                    if (used_b[b]) continue;
                    for (int e = 0; e < 12; ++e)
                        if (!used_e[e] && overlap(b, e) > best) {
                            best = overlap(b, e);
                            bb = b;
                            be = e;
                        }
                }
                used_b[bb] = used_e[be] = true;
                assign[bb] = be;
            }
        }
        Eigen::Matrix<Complex, 12, 12> cur;
        for (int b = 0; b < 12; ++b) {
            const int e = assign[b];
            const double w2 = sp.omega2[e];
            bs.omega2[b][j] = w2;
            bs.omega[b][j] = std::sqrt(std::max(w2, 0.0));
            bs.u_fraction[b][j] = sp.vectors.col(e).head<3>().squaredNorm() / sp.vectors.col(e).squaredNorm();
            cur.col(b) = sp.vectors.col(e);
        }
        prev = cur;
    }

    const double wscale = std::max(1.0, bs.omega_max());
    for (int b = 0; b < 12; ++b) {
        const auto& w = bs.omega[b];
        BranchClass c;
        if (w[0] > kOpticThreshold * wscale) c = BranchClass::optic;
        else if ((w[1] - w[0]) / (bs.k[1] - bs.k[0]) > kSlopeThreshold) c = BranchClass::acoustic;
        else c = BranchClass::flat;
        bs.classification.push_back(c);
        bool up = true, down = true;
        for (std::size_t j = 1; j + 1 < ns; ++j) {
            const double d2 = w[j + 1] - 2 * w[j] + w[j - 1];
            if (d2 < -1e-12 * wscale) up = false;
            if (d2 > 1e-12 * wscale) down = false;
        }
        bs.concavity.push_back(up && !down ? 1 : (down && !up ? -1 : 0));
    }
    return bs;
}

/// n equally spaced samples on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return r;
}

struct Gap {
    double lo;
    double hi;
};

struct GapReport {
    std::vector<Gap> gaps;
    std::size_t resolution;  // k samples per branch
    double omega_max;
};

/// Gaps between the covered regions of the branch intervals. Each branch
/// covers [min, max] of every pair of consecutive samples; nothing is
/// reported below the lowest or above the highest covered frequency.
inline GapReport detect_band_gaps(const std::vector<std::vector<double>>& omega_by_branch) {
    std::vector<Gap> cover;
    double wmax = 0.0;
    std::size_t res = 0;
    for (const auto& b : omega_by_branch) {
        res = std::max(res, b.size());
        for (std::size_t j = 0; j < b.size(); ++j) {
            wmax = std::max(wmax, b[j]);
            if (b.size() == 1) cover.push_back({b[0], b[0]});
            if (j + 1 < b.size()) cover.push_back({std::min(b[j], b[j + 1]), std::max(b[j], b[j + 1])});
        }
    }
    std::sort(cover.begin(), cover.end(), [](const Gap& a, const Gap& b) { return a.lo < b.lo; });
    GapReport r{{}, res, wmax};
    double reach = 0.0;  // everything in [0, reach] is covered or already reported
    bool started = false;
    for (const auto& c : cover) {
        if (!started) {
            started = true;
            reach = c.hi;
            continue;
        }
        if (c.lo > reach) r.gaps.push_back({reach, c.lo});
        reach = std::max(reach, c.hi);
    }
    return r;
}

inline GapReport detect_band_gaps(const BranchSet& bs) { return detect_band_gaps(bs.omega); }

}  // namespace micromorphic

#endif  // MICROMORPHIC_DISPERSION_HPP
