#ifndef MICROMORPHIC_GRID_HPP
#define MICROMORPHIC_GRID_HPP

// Periodic grid fields on [0, 2pi)^3 and the row-wise differential operators.
//
// Storage is component-major: component c of node idx lives at
// data[c * nodes + idx], idx = i1 + n * (i2 + n * i3) (x1 fastest).
// Every operator is assembled from one skew-adjoint first derivative D_a,
// so discrete integration by parts holds exactly on both backends.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <fftw3.h>

#include "micromorphic/error.hpp"
#include "micromorphic/tensor.hpp"

namespace micromorphic {

enum class Backend { spectral, fd2 };

inline std::string to_string(Backend b) { return b == Backend::spectral ? "spectral" : "fd2"; }

inline Backend parse_backend(const std::string& s) {
    if (s == "spectral") return Backend::spectral;
    if (s == "fd2") return Backend::fd2;
    throw InvalidGrid("unknown backend '" + s + "' (expected spectral or fd2)");
}

class Grid {
public:
    Grid() = default;
    Grid(int n, Backend backend) : n_(n), backend_(backend) {
        if (n < 4 || (n & (n - 1)) != 0)
            throw InvalidGrid("grid size n = " + std::to_string(n) +
                              " must be a power of two with n >= 4");
    }

    int n() const { return n_; }
    Backend backend() const { return backend_; }
    std::size_t nodes() const { return std::size_t(n_) * n_ * n_; }
    double spacing() const { return 2.0 * std::numbers::pi / n_; }
    double cell_volume() const { const double h = spacing(); return h * h * h; }
    double volume() const { const double l = 2.0 * std::numbers::pi; return l * l * l; }

    std::size_t index(int i1, int i2, int i3) const {
        return std::size_t(i1) + std::size_t(n_) * (std::size_t(i2) + std::size_t(n_) * std::size_t(i3));
    }
    std::array<int, 3> multi_index(std::size_t idx) const {
        const std::size_t n = n_;
        return {int(idx % n), int((idx / n) % n), int(idx / (n * n))};
    }
    Vector3 coord(std::size_t idx) const {
        const auto m = multi_index(idx);
        const double h = spacing();
        return {{m[0] * h, m[1] * h, m[2] * h}};
    }
    /// Signed integer wavenumber of 1-D index i (Nyquist reported as +n/2).
    int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }

    bool operator==(const Grid& o) const { return n_ == o.n_ && backend_ == o.backend_; }

private:
    int n_ = 16;
    Backend backend_ = Backend::spectral;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) {
        std::ostringstream os;
        os << "fields live on different grids (n=" << a.n() << "/" << to_string(a.backend())
           << " vs n=" << b.n() << "/" << to_string(b.backend()) << ")";
        throw GridMismatch(os.str());
    }
}

template <std::size_t N>
constexpr const char* kind_name() {
    if constexpr (N == 1) return "scalar";
    else if constexpr (N == 3) return "vector";
    else if constexpr (N == 9) return "tensor";
    else return "array";
}

template <std::size_t N>
class Field {
public:
    static constexpr std::size_t components = N;

    Field() = default;
    explicit Field(const Grid& g) : grid_(g), data_(N * g.nodes(), 0.0) {}
    Field(const Grid& g, std::vector<double> data) : grid_(g), data_(std::move(data)) {
        if (data_.size() != N * g.nodes()) throw GridMismatch("data size does not match grid");
    }

    const Grid& grid() const { return grid_; }
    std::size_t nodes() const { return grid_.nodes(); }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double* component(std::size_t c) { return data_.data() + c * nodes(); }
    const double* component(std::size_t c) const { return data_.data() + c * nodes(); }
    double& operator()(std::size_t c, std::size_t node) { return data_[c * nodes() + node]; }
    double operator()(std::size_t c, std::size_t node) const { return data_[c * nodes() + node]; }

    Tensor2 tensor(std::size_t node) const requires(N == 9) {
        Tensor2 t;
        for (std::size_t c = 0; c < 9; ++c) t[c] = (*this)(c, node);
        return t;
    }
    void set(std::size_t node, const Tensor2& t) requires(N == 9) {
        for (std::size_t c = 0; c < 9; ++c) (*this)(c, node) = t[c];
    }
    Vector3 vec(std::size_t node) const requires(N == 3) {
        return {{(*this)(0, node), (*this)(1, node), (*this)(2, node)}};
    }
    void set(std::size_t node, const Vector3& v) requires(N == 3) {
        for (std::size_t c = 0; c < 3; ++c) (*this)(c, node) = v[c];
    }
    double value(std::size_t node) const requires(N == 1) { return data_[node]; }
    void set(std::size_t node, double v) requires(N == 1) { data_[node] = v; }

    Field& operator+=(const Field& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Field& operator-=(const Field& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Field& operator*=(double s) {
        for (auto& x : data_) x *= s;
        return *this;
    }
    /// this += s * o
    Field& axpy(double s, const Field& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }
    friend Field operator*(Field a, double s) { return a *= s; }
    friend Field operator-(Field a) { return a *= -1.0; }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::abs(x));
        return m;
    }
    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
    }

private:
    Grid grid_;
    std::vector<double> data_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using TensorField = Field<9>;
/// Row-wise gradient of a tensor field: component 3*c + a = d_a P_c.
using GradTensorField = Field<27>;

/// Pointwise map over tensor-valued nodes.
template <class F>
TensorField map_tensor(const TensorField& x, F&& f) {
    TensorField r(x.grid());
    for (std::size_t i = 0; i < x.nodes(); ++i) r.set(i, f(x.tensor(i)));
    return r;
}

template <std::size_t N>
double inner(const Field<N>& f, const Field<N>& g) {
    require_same_grid(f.grid(), g.grid());
    double s = 0.0;
    const auto& a = f.data();
    const auto& b = g.data();
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s * f.grid().cell_volume();
}

template <std::size_t N>
double l2_norm(const Field<N>& f) {
    return std::sqrt(inner(f, f));
}

template <std::size_t N>
std::array<double, N> mean(const Field<N>& f) {
    std::array<double, N> m{};
    for (std::size_t c = 0; c < N; ++c) {
        const double* p = f.component(c);
        double s = 0.0;
        for (std::size_t i = 0; i < f.nodes(); ++i) s += p[i];
        m[c] = s / double(f.nodes());
    }
    return m;
}

/// True when every axis index keeps `margin` nodes away from the wrap-around seam.
inline bool is_interior(const Grid& g, std::size_t idx, int margin = 1) {
    const auto m = g.multi_index(idx);
    for (int a = 0; a < 3; ++a)
        if (m[a] < margin || m[a] > g.n() - 1 - margin) return false;
    return true;
}

namespace detail {

template <std::size_t N, class R>
void store(Field<N>& f, std::size_t idx, const R& r) {
    if constexpr (std::is_arithmetic_v<R>) {
        static_assert(N == 1);
        f(0, idx) = r;
    } else {
        for (std::size_t c = 0; c < N; ++c) f(c, idx) = r[c];
    }
}

}  // namespace detail

/// Samples fn(x) at every node. fn returns double, Vector3 or Tensor2.
template <std::size_t N, class F>
Field<N> sample(const Grid& g, F&& fn) {
    Field<N> f(g);
    for (std::size_t i = 0; i < g.nodes(); ++i) detail::store(f, i, fn(g.coord(i)));
    return f;
}

// ---------------------------------------------------------------------------
// FFT plumbing

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// In-place 3-D complex transform of size n^3. Dimensions are passed as
/// (n3, n2, n1) so FFTW's fastest index matches x1.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n), size_(std::size_t(n) * n * n) {
        buf_ = fftw_alloc_complex(size_);
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_3d(n, n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::complex<double>* buffer() { return reinterpret_cast<std::complex<double>*>(buf_); }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }
    std::size_t size() const { return size_; }

private:
    int n_;
    std::size_t size_;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

inline FftPlan& plan_for(int n) {
    thread_local std::map<int, std::unique_ptr<FftPlan>> cache;
    auto& p = cache[n];
    if (!p) p = std::make_unique<FftPlan>(n);
    return *p;
}

inline constexpr double kImagResidueTolerance = 1e-12;

inline std::vector<std::complex<double>> forward(const Grid& g, const double* x) {
    auto& plan = plan_for(g.n());
    auto* b = plan.buffer();
    for (std::size_t i = 0; i < plan.size(); ++i) b[i] = x[i];
    plan.forward();
    return std::vector<std::complex<double>>(b, b + plan.size());
}

/// Inverse transform into real storage, asserting a negligible imaginary part.
inline void backward(const Grid& g, const std::vector<std::complex<double>>& hat, double* out) {
    auto& plan = plan_for(g.n());
    auto* b = plan.buffer();
    std::copy(hat.begin(), hat.end(), b);
    plan.backward();
    const double scale = 1.0 / double(plan.size());
    double max_re = 0.0, max_im = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        out[i] = b[i].real() * scale;
        max_re = std::max(max_re, std::abs(out[i]));
        max_im = std::max(max_im, std::abs(b[i].imag() * scale));
    }
    if (max_im > kImagResidueTolerance * std::max(1.0, max_re)) {
        std::ostringstream os;
        os << "imaginary residue " << max_im << " after inverse transform";
        throw NonFiniteValue(os.str());
    }
}

/// First-derivative multipliers i*k_a per node, Nyquist mode zeroed.
inline const std::array<std::vector<double>, 3>& wavenumbers(int n) {
    thread_local std::map<int, std::array<std::vector<double>, 3>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Grid g(n, Backend::spectral);
    std::array<std::vector<double>, 3> k;
    for (auto& v : k) v.resize(g.nodes());
    for (std::size_t idx = 0; idx < g.nodes(); ++idx) {
        const auto m = g.multi_index(idx);
        for (int a = 0; a < 3; ++a) {
            const int w = g.wavenumber(m[a]);
            k[a][idx] = (2 * std::abs(w) == n) ? 0.0 : double(w);
        }
    }
    return cache.emplace(n, std::move(k)).first->second;
}

/// Periodic central difference along axis a.
inline void central_difference(const Grid& g, const double* x, int a, double coeff, double* out) {
    const int n = g.n();
    const double s = coeff / (2.0 * g.spacing());
    const std::size_t stride = a == 0 ? 1 : (a == 1 ? std::size_t(n) : std::size_t(n) * n);
    for (std::size_t idx = 0; idx < g.nodes(); ++idx) {
        const int i = g.multi_index(idx)[a];
        const std::size_t up = i == n - 1 ? idx - stride * (n - 1) : idx + stride;
        const std::size_t dn = i == 0 ? idx + stride * (n - 1) : idx - stride;
        out[idx] += s * (x[up] - x[dn]);
    }
}

}  // namespace detail

/// One term of a first-order operator: out[out_c] += coeff * D_axis in[in_c].
struct DerivativeTerm {
    std::size_t out;
    std::size_t in;
    int axis;
    double coeff;
};

template <std::size_t Out, std::size_t In>
Field<Out> apply_first_order(const Field<In>& in, const std::vector<DerivativeTerm>& terms) {
    const Grid& g = in.grid();
    Field<Out> out(g);
    if (g.backend() == Backend::fd2) {
        for (const auto& t : terms)
            detail::central_difference(g, in.component(t.in), t.axis, t.coeff, out.component(t.out));
        return out;
    }
    const auto& k = detail::wavenumbers(g.n());
    std::array<std::vector<std::complex<double>>, In> hats;
    std::array<std::vector<std::complex<double>>, Out> acc;
    for (const auto& t : terms)
        if (hats[t.in].empty()) hats[t.in] = detail::forward(g, in.component(t.in));
    for (const auto& t : terms) {
        auto& a = acc[t.out];
        if (a.empty()) a.assign(g.nodes(), 0.0);
        const auto& h = hats[t.in];
        const auto& ka = k[t.axis];
        const std::complex<double> ic(0.0, t.coeff);
        for (std::size_t i = 0; i < g.nodes(); ++i) a[i] += ic * ka[i] * h[i];
    }
    for (std::size_t c = 0; c < Out; ++c)
        if (!acc[c].empty()) detail::backward(g, acc[c], out.component(c));
    return out;
}

namespace detail {

inline const std::vector<DerivativeTerm>& grad_terms(std::size_t rows) {
    thread_local std::map<std::size_t, std::vector<DerivativeTerm>> cache;
    auto& t = cache[rows];
    if (t.empty())
        for (std::size_t c = 0; c < rows; ++c)
            for (int a = 0; a < 3; ++a) t.push_back({3 * c + a, c, a, 1.0});
    return t;
}

inline const std::vector<DerivativeTerm>& div_terms(std::size_t rows) {
    thread_local std::map<std::size_t, std::vector<DerivativeTerm>> cache;
    auto& t = cache[rows];
    if (t.empty())
        for (std::size_t c = 0; c < rows; ++c)
            for (int a = 0; a < 3; ++a) t.push_back({c, 3 * c + a, a, 1.0});
    return t;
}

/// (Curl P)_ik = eps_klm d_l P_im, for `rows` rows.
inline const std::vector<DerivativeTerm>& curl_terms(std::size_t rows) {
    thread_local std::map<std::size_t, std::vector<DerivativeTerm>> cache;
    auto& t = cache[rows];
    if (t.empty())
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = 0; k < 3; ++k)
                for (std::size_t l = 0; l < 3; ++l)
                    for (std::size_t m = 0; m < 3; ++m) {
                        const int e = levi_civita(k, l, m);
                        if (e != 0) t.push_back({3 * i + k, 3 * i + m, int(l), double(e)});
                    }
    return t;
}

}  // namespace detail

inline VectorField grad(const ScalarField& f) {
    return apply_first_order<3>(f, detail::grad_terms(1));
}
/// (Grad v)_ij = d_j v_i
inline TensorField Grad(const VectorField& v) {
    return apply_first_order<9>(v, detail::grad_terms(3));
}
inline GradTensorField Grad(const TensorField& p) {
    return apply_first_order<27>(p, detail::grad_terms(9));
}
inline ScalarField div(const VectorField& v) {
    return apply_first_order<1>(v, detail::div_terms(1));
}
/// Row-wise divergence: (Div P)_i = d_j P_ij
inline VectorField Div(const TensorField& p) {
    return apply_first_order<3>(p, detail::div_terms(3));
}
inline TensorField Div(const GradTensorField& q) {
    return apply_first_order<9>(q, detail::div_terms(9));
}
inline VectorField curl(const VectorField& v) {
    return apply_first_order<3>(v, detail::curl_terms(1));
}
inline TensorField Curl(const TensorField& p) {
    return apply_first_order<9>(p, detail::curl_terms(3));
}
/// Div Grad, composed from the first derivative D_a on both backends.
template <std::size_t N>
Field<N> laplacian(const Field<N>& f) {
    return apply_first_order<N>(apply_first_order<3 * N>(f, detail::grad_terms(N)),
                                detail::div_terms(N));
}

/// Curl of the spherical field zeta * 1, which equals -anti(grad zeta).
inline TensorField curl_of_scalar_identity(const ScalarField& zeta) {
    const VectorField g = grad(zeta);
    TensorField r(zeta.grid());
    for (std::size_t i = 0; i < zeta.nodes(); ++i) r.set(i, -anti(g.vec(i)));
    return r;
}

/// Discrete L2 product evaluated in Fourier space (Parseval).
template <std::size_t N>
double inner_spectral(const Field<N>& f, const Field<N>& g) {
    require_same_grid(f.grid(), g.grid());
    double s = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        const auto a = detail::forward(f.grid(), f.component(c));
        const auto b = detail::forward(g.grid(), g.component(c));
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real();
    }
    return s / double(f.nodes()) * f.grid().cell_volume();
}

/// Normal random samples with every mode |k_a| > n/3 removed.
template <std::size_t N, class Rng>
Field<N> random_band_limited(const Grid& g, Rng& rng, double amplitude = 1.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Field<N> f(g);
    for (auto& x : f.data()) x = amplitude * normal(rng);
    const double cutoff = g.n() / 3.0;
    for (std::size_t c = 0; c < N; ++c) {
        auto hat = detail::forward(g, f.component(c));
        for (std::size_t idx = 0; idx < g.nodes(); ++idx) {
            const auto m = g.multi_index(idx);
            for (int a = 0; a < 3; ++a)
                if (std::abs(g.wavenumber(m[a])) > cutoff) {
                    hat[idx] = 0.0;
                    break;
                }
        }
        detail::backward(g, hat, f.component(c));
    }
    return f;
}

/// Random field that is skew (9 components) at every node.
template <class Rng>
TensorField random_skew(const Grid& g, Rng& rng, double amplitude = 1.0) {
    const auto w = random_band_limited<3>(g, rng, amplitude);
    TensorField a(g);
    for (std::size_t i = 0; i < g.nodes(); ++i) a.set(i, anti(w.vec(i)));
    return a;
}

template <class Rng>
TensorField random_symmetric(const Grid& g, Rng& rng, double amplitude = 1.0) {
    return map_tensor(random_band_limited<9>(g, rng, amplitude),
                      [](const Tensor2& x) { return sym(x); });
}

// ---------------------------------------------------------------------------
// Snapshots

enum class SnapshotFormat { csv, binary };

template <std::size_t N>
void write_snapshot(const std::string& path, const Field<N>& f, SnapshotFormat fmt) {
    const Grid& g = f.grid();
    if (fmt == SnapshotFormat::csv) {
        std::ofstream os(path);
        if (!os) throw Error("IoError", "cannot open " + path);
        os << "n,kind,components,backend\n"
           << g.n() << ',' << kind_name<N>() << ',' << N << ',' << to_string(g.backend()) << '\n';
        os << "i1,i2,i3";
        for (std::size_t c = 0; c < N; ++c) os << ",c" << c;
        os << '\n';
        char buf[32];
        for (std::size_t idx = 0; idx < g.nodes(); ++idx) {
            const auto m = g.multi_index(idx);
            os << m[0] << ',' << m[1] << ',' << m[2];
            for (std::size_t c = 0; c < N; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", f(c, idx));
                os << ',' << buf;
            }
            os << '\n';
        }
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("IoError", "cannot open " + path);
    const char magic[8] = {'M', 'M', 'F', 'I', 'E', 'L', 'D', '1'};
    os.write(magic, 8);
    const std::uint32_t hdr[3] = {std::uint32_t(g.n()), std::uint32_t(N),
                                  std::uint32_t(g.backend() == Backend::spectral ? 0 : 1)};
    os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    for (std::size_t idx = 0; idx < g.nodes(); ++idx)
        for (std::size_t c = 0; c < N; ++c) {
            const double v = f(c, idx);
            os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

template <std::size_t N>
Field<N> read_snapshot(const std::string& path, SnapshotFormat fmt) {
    if (fmt == SnapshotFormat::csv) {
        std::ifstream is(path);
        if (!is) throw Error("IoError", "cannot open " + path);
        std::string line;
        std::getline(is, line);
        std::getline(is, line);
        std::istringstream hs(line);
        std::string n, kind, comps, backend;
        std::getline(hs, n, ',');
        std::getline(hs, kind, ',');
        std::getline(hs, comps, ',');
        std::getline(hs, backend, ',');
        if (std::stoul(comps) != N) throw GridMismatch("snapshot holds a " + kind + " field");
        Field<N> f(Grid(std::stoi(n), parse_backend(backend)));
        std::getline(is, line);
        for (std::size_t idx = 0; idx < f.nodes(); ++idx) {
            if (!std::getline(is, line)) throw Error("IoError", "truncated snapshot " + path);
            std::istringstream ls(line);
            std::string tok;
            for (int s = 0; s < 3; ++s) std::getline(ls, tok, ',');
            for (std::size_t c = 0; c < N; ++c) {
                std::getline(ls, tok, ',');
                f(c, idx) = std::stod(tok);
            }
        }
        return f;
    }
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("IoError", "cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "MMFIELD1", 8) != 0) throw Error("IoError", "bad snapshot header in " + path);
    std::uint32_t hdr[3];
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    if (hdr[1] != N) throw GridMismatch("snapshot component count " + std::to_string(hdr[1]));
    Field<N> f(Grid(int(hdr[0]), hdr[2] == 0 ? Backend::spectral : Backend::fd2));
    for (std::size_t idx = 0; idx < f.nodes(); ++idx)
        for (std::size_t c = 0; c < N; ++c) {
            double v;
            is.read(reinterpret_cast<char*>(&v), sizeof v);
            f(c, idx) = v;
        }
    if (!is) throw Error("IoError", "truncated snapshot " + path);
    return f;
}

}  // namespace micromorphic

#endif  // MICROMORPHIC_GRID_HPP
