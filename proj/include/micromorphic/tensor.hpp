#ifndef MICROMORPHIC_TENSOR_HPP
#define MICROMORPHIC_TENSOR_HPP

// Closed-form algebra of 3x3 tensors: Cartan decomposition, axial maps,
// Frobenius products. Indices are 0-based in code (math index i <-> i-1).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>

#include "micromorphic/error.hpp"

namespace micromorphic {

template <class T>
struct Vec3 {
    std::array<T, 3> v{};

    constexpr T& operator[](std::size_t i) { return v[i]; }
    constexpr const T& operator[](std::size_t i) const { return v[i]; }

    constexpr Vec3& operator+=(const Vec3& o) {
        for (std::size_t i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) {
        for (std::size_t i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    constexpr Vec3& operator*=(T s) {
        for (auto& x : v) x *= s;
        return *this;
    }
    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend constexpr Vec3 operator*(T s, Vec3 a) { return a *= s; }
    friend constexpr Vec3 operator*(Vec3 a, T s) { return a *= s; }
    friend constexpr Vec3 operator-(Vec3 a) { return a *= T(-1); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

/// Second-order tensor on R^3, row-major: (i,j) -> entries[3*i+j].
template <class T>
struct Mat3 {
    std::array<T, 9> a{};

    static constexpr Mat3 zero() { return {}; }
    static constexpr Mat3 identity() {
        Mat3 m;
        m.a[0] = m.a[4] = m.a[8] = T(1);
        return m;
    }
    static constexpr Mat3 unit(std::size_t i, std::size_t j) {
        Mat3 m;
        m(i, j) = T(1);
        return m;
    }

    constexpr T& operator()(std::size_t i, std::size_t j) { return a[3 * i + j]; }
    constexpr const T& operator()(std::size_t i, std::size_t j) const { return a[3 * i + j]; }
    constexpr T& operator[](std::size_t k) { return a[k]; }
    constexpr const T& operator[](std::size_t k) const { return a[k]; }

    constexpr Mat3& operator+=(const Mat3& o) {
        for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
        return *this;
    }
    constexpr Mat3& operator-=(const Mat3& o) {
        for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
        return *this;
    }
    constexpr Mat3& operator*=(T s) {
        for (auto& x : a) x *= s;
        return *this;
    }
    friend constexpr Mat3 operator+(Mat3 x, const Mat3& y) { return x += y; }
    friend constexpr Mat3 operator-(Mat3 x, const Mat3& y) { return x -= y; }
    friend constexpr Mat3 operator*(T s, Mat3 x) { return x *= s; }
    friend constexpr Mat3 operator*(Mat3 x, T s) { return x *= s; }
    friend constexpr Mat3 operator-(Mat3 x) { return x *= T(-1); }
    friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

using Tensor2 = Mat3<double>;
using AxialVector = Vec3<double>;
using Vector3 = Vec3<double>;

/// Levi-Civita symbol on 0-based indices.
constexpr int levi_civita(std::size_t i, std::size_t j, std::size_t k) {
    if (i == j || j == k || i == k) return 0;
    // even permutations of (0,1,2)
    if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
        (i == 2 && j == 0 && k == 1))
        return 1;
    return -1;
}

template <class T>
constexpr Mat3<T> transpose(const Mat3<T>& x) {
    Mat3<T> r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = x(j, i);
    return r;
}

template <class T>
constexpr T tr(const Mat3<T>& x) {
    return x(0, 0) + x(1, 1) + x(2, 2);
}

template <class T>
constexpr Mat3<T> sym(const Mat3<T>& x) {
    Mat3<T> r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = T(0.5) * (x(i, j) + x(j, i));
    return r;
}

template <class T>
constexpr Mat3<T> skew(const Mat3<T>& x) {
    Mat3<T> r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = T(0.5) * (x(i, j) - x(j, i));
    return r;
}

template <class T>
constexpr Mat3<T> dev(const Mat3<T>& x) {
    Mat3<T> r = x;
    const T t = tr(x) / T(3);
    r(0, 0) -= t;
    r(1, 1) -= t;
    r(2, 2) -= t;
    return r;
}

template <class T>
constexpr Mat3<T> devsym(const Mat3<T>& x) {
    return dev(sym(x));
}

/// tr(X)/3 * 1
template <class T>
constexpr Mat3<T> sph(const Mat3<T>& x) {
    return (tr(x) / T(3)) * Mat3<T>::identity();
}

template <class T>
constexpr Mat3<T> matmul(const Mat3<T>& x, const Mat3<T>& y) {
    Mat3<T> r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            T s{};
            for (std::size_t k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

template <class T>
constexpr Vec3<T> matvec(const Mat3<T>& x, const Vec3<T>& v) {
    Vec3<T> r;
    for (std::size_t i = 0; i < 3; ++i)
        r[i] = x(i, 0) * v[0] + x(i, 1) * v[1] + x(i, 2) * v[2];
    return r;
}

/// a b^T
template <class T>
constexpr Mat3<T> outer(const Vec3<T>& a, const Vec3<T>& b) {
    Mat3<T> r;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) = a[i] * b[j];
    return r;
}

template <class T>
constexpr Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

/// Frobenius product <X, Y> = sum X_ij Y_ij (bilinear, no conjugation).
template <class T>
constexpr T inner(const Mat3<T>& x, const Mat3<T>& y) {
    T s{};
    for (std::size_t k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
    return s;
}

template <class T>
constexpr T dot(const Vec3<T>& x, const Vec3<T>& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

inline double norm2(const Tensor2& x) { return inner(x, x); }
inline double norm(const Tensor2& x) { return std::sqrt(norm2(x)); }
inline double norm2(const Vector3& v) { return dot(v, v); }
inline double norm(const Vector3& v) { return std::sqrt(norm2(v)); }

/// anti(v) * w = v x w.
template <class T>
constexpr Mat3<T> anti(const Vec3<T>& v) {
    Mat3<T> r;
    r(0, 1) = -v[2];
    r(0, 2) = v[1];
    r(1, 0) = v[2];
    r(1, 2) = -v[0];
    r(2, 0) = -v[1];
    r(2, 1) = v[0];
    return r;
}

/// Axial vector of the skew part; no skewness check.
template <class T>
constexpr Vec3<T> axl_of_skew_part(const Mat3<T>& a) {
    return {{T(0.5) * (a(2, 1) - a(1, 2)), T(0.5) * (a(0, 2) - a(2, 0)),
             T(0.5) * (a(1, 0) - a(0, 1))}};
}

inline constexpr double kSkewTolerance = 1e-12;

/// Inverse of anti. Throws NonSkewInput when ||sym A|| > 1e-12 ||A||.
inline AxialVector axl(const Tensor2& a) {
    const double s = norm(sym(a));
    if (s > kSkewTolerance * norm(a)) {
        std::ostringstream os;
        os << "axl requires a skew-symmetric tensor, ||sym A|| = " << s
           << " exceeds tolerance " << kSkewTolerance << " * ||A|| = " << kSkewTolerance * norm(a);
        throw NonSkewInput(os.str());
    }
    return axl_of_skew_part(a);
}

struct CartanParts {
    Tensor2 devsym;
    Tensor2 skew;
    Tensor2 sph;  // tr(X)/3 * 1
};

inline CartanParts cartan_decompose(const Tensor2& x) {
    return {devsym(x), skew(x), sph(x)};
}

/// Coefficients of a1||X||^2 + a2<X,X^T> + a3 tr(X)^2 in the Cartan basis:
/// c_devsym ||devsym X||^2 + c_skew ||skew X||^2 + c_sph tr(X)^2.
struct QuadformCoefficients {
    double c_devsym;
    double c_skew;
    double c_sph;
};

constexpr QuadformCoefficients quadform_decompose(double a1, double a2, double a3) {
    return {a1 + a2, a1 - a2, (a1 + a2 + 3.0 * a3) / 3.0};
}

inline bool is_finite(const Tensor2& x) {
    for (double v : x.a)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_TENSOR_HPP
