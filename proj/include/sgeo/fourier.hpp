#ifndef SGEO_FOURIER_HPP
#define SGEO_FOURIER_HPP

// Band-limited functions on the p-torus (period L per axis) and the
// sampling-grid transforms used to evaluate pointwise products exactly.

#include "sgeo/operator.hpp"

#include <array>
#include <map>
#include <span>

namespace sgeo {

using Mode = std::array<int, 3>;
using Point = std::array<double, 3>;

inline int linf(const Mode& k) { return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}); }

inline Mode operator+(const Mode& a, const Mode& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Mode operator-(const Mode& a, const Mode& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Mode operator-(const Mode& a) { return {-a[0], -a[1], -a[2]}; }

/// Trigonometric polynomial sum_k c_k exp(2 pi i k.x / L).
class TrigPoly {
public:
    TrigPoly() = default;
    TrigPoly(int p, double period) : p_(p), period_(period) {}

    static TrigPoly constant(int p, double period, cd c) {
        TrigPoly t(p, period);
        t.set({0, 0, 0}, c);
        return t;
    }
    static TrigPoly monomial(int p, double period, const Mode& k, cd c = 1.0) {
        TrigPoly t(p, period);
        t.set(k, c);
        return t;
    }
    static TrigPoly cosine(int p, double period, int axis, int freq = 1) {
        Mode k{0, 0, 0};
        k[static_cast<std::size_t>(axis)] = freq;
        TrigPoly t(p, period);
        t.set(k, 0.5);
        t.set(-k, 0.5);
        return t;
    }
    static TrigPoly sine(int p, double period, int axis, int freq = 1) {
        Mode k{0, 0, 0};
        k[static_cast<std::size_t>(axis)] = freq;
        TrigPoly t(p, period);
        t.set(k, -0.5 * I);
        t.set(-k, 0.5 * I);
        return t;
    }

    int p() const { return p_; }
    double period() const { return period_; }
    const std::map<Mode, cd>& coeffs() const { return c_; }

    void set(const Mode& k, cd v) {
        if (v == cd(0.0)) c_.erase(k);
        else c_[k] = v;
    }
    void add(const Mode& k, cd v) { set(k, coeff(k) + v); }
    cd coeff(const Mode& k) const {
        auto it = c_.find(k);
        return it == c_.end() ? cd(0.0) : it->second;
    }

    int bandwidth() const {
        int b = 0;
        for (const auto& [k, v] : c_) b = std::max(b, linf(k));
        return b;
    }

    bool is_zero(double tol = 0.0) const {
        for (const auto& [k, v] : c_)
            if (std::abs(v) > tol) return false;
        return true;
    }

    /// pointwise complex conjugate
    TrigPoly conj() const {
        TrigPoly r(p_, period_);
        for (const auto& [k, v] : c_) r.set(-k, std::conj(v));
        return r;
    }

    bool is_real(double tol = 1e-12) const {
        for (const auto& [k, v] : c_)
            if (std::abs(v - std::conj(coeff(-k))) > tol) return false;
        return true;
    }

    /// d/dx_axis
    TrigPoly derivative(int axis) const {
        TrigPoly r(p_, period_);
        const double w = 2.0 * kPi / period_;
        for (const auto& [k, v] : c_) r.set(k, v * I * w * static_cast<double>(k[static_cast<std::size_t>(axis)]));
        return r;
    }

    cd operator()(const Point& x) const {
        cd s = 0.0;
        const double w = 2.0 * kPi / period_;
        for (const auto& [k, v] : c_) s += v * std::exp(I * w * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
        return s;
    }

    cd mean() const { return coeff({0, 0, 0}); }

    /// Keep only |k|_inf <= b.
    TrigPoly band_limited(int b) const {
        TrigPoly r(p_, period_);
        for (const auto& [k, v] : c_)
            if (linf(k) <= b) r.set(k, v);
        return r;
    }

    double max_coeff_distance(const TrigPoly& o) const {
        double d = 0.0;
        for (const auto& [k, v] : c_) d = std::max(d, std::abs(v - o.coeff(k)));
        for (const auto& [k, v] : o.c_) d = std::max(d, std::abs(v - coeff(k)));
        return d;
    }

    friend TrigPoly operator+(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly r = a;
        for (const auto& [k, v] : b.c_) r.add(k, v);
        return r;
    }
    friend TrigPoly operator-(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly r = a;
        for (const auto& [k, v] : b.c_) r.add(k, -v);
        return r;
    }
    friend TrigPoly operator*(cd s, const TrigPoly& a) {
        TrigPoly r(a.p_, a.period_);
        for (const auto& [k, v] : a.c_) r.set(k, s * v);
        return r;
    }
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly r(a.p_, a.period_);
        for (const auto& [ka, va] : a.c_)
            for (const auto& [kb, vb] : b.c_) r.add(ka + kb, va * vb);
        return r;
    }

private:
    int p_ = 1;
    double period_ = 2.0 * kPi;
    std::map<Mode, cd> c_;
};

// ---------------------------------------------------------------------------
// Dense p-dimensional arrays and separable transforms

/// Row-major array over a p-dimensional box, axes of equal length.
struct BoxArray {
    int p = 1;
    int n = 1;  // length per axis
    std::vector<cd> data;

    BoxArray() = default;
    BoxArray(int p_, int n_) : p(p_), n(n_), data(static_cast<std::size_t>(ipow(n_, p_)), cd(0.0)) {}

    static std::size_t ipow(int b, int e) {
        std::size_t r = 1;
        for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(b);
        return r;
    }
    std::size_t size() const { return data.size(); }

    std::size_t flat(const std::array<int, 3>& idx) const {
        std::size_t f = 0;
        for (int a = 0; a < p; ++a) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        return f;
    }
    std::array<int, 3> unflat(std::size_t f) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = p - 1; a >= 0; --a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(f % static_cast<std::size_t>(n));
            f /= static_cast<std::size_t>(n);
        }
        return idx;
    }
};

/// Apply W (m x in.n) along every axis of `in`, producing an m-per-axis array.
inline BoxArray transform_all_axes(const BoxArray& in, const Dense& w) {
    BoxArray cur = in;
    const int m = static_cast<int>(w.rows());
    for (int axis = 0; axis < in.p; ++axis) {
        // shape before: axes < axis have length m, axes >= axis have length cur_n
        std::array<int, 3> shape{};
        for (int a = 0; a < in.p; ++a) shape[static_cast<std::size_t>(a)] = a < axis ? m : in.n;
        std::array<int, 3> oshape = shape;
        oshape[static_cast<std::size_t>(axis)] = m;
        std::size_t outer = 1, inner = 1;
        for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
        for (int a = axis + 1; a < in.p; ++a) inner *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
        const auto len = static_cast<std::size_t>(shape[static_cast<std::size_t>(axis)]);
        std::vector<cd> out(outer * static_cast<std::size_t>(m) * inner, cd(0.0));
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < inner; ++i)
                for (int r = 0; r < m; ++r) {
                    cd s = 0.0;
                    for (std::size_t c = 0; c < len; ++c)
                        s += w(r, static_cast<Eigen::Index>(c)) * cur.data[(o * len + c) * inner + i];
                    out[(o * static_cast<std::size_t>(m) + static_cast<std::size_t>(r)) * inner + i] = s;
                }
        cur.data = std::move(out);
        (void)oshape;
    }
    cur.n = m;
    return cur;
}

/// Sampling grid of N points per axis on [0, L)^p.
struct SamplingGrid {
    int p = 1;
    int n = 1;
    double period = 2.0 * kPi;

    std::size_t size() const { return BoxArray::ipow(n, p); }

    Point point(std::size_t f) const {
        BoxArray shape(p, n);
        shape.data.clear();
        const auto idx = shape.unflat(f);
        Point x{0, 0, 0};
        for (int a = 0; a < p; ++a) x[static_cast<std::size_t>(a)] = period * idx[static_cast<std::size_t>(a)] / n;
        return x;
    }

    /// Coefficients on the box |k|_inf <= b  ->  samples on the grid.
    BoxArray synthesize(const BoxArray& coeffs) const {
        const int b = (coeffs.n - 1) / 2;
        Dense w(n, coeffs.n);
        for (int j = 0; j < n; ++j)
            for (int k = -b; k <= b; ++k) w(j, k + b) = std::exp(I * (2.0 * kPi * k * j / n));
        return transform_all_axes(coeffs, w);
    }

    /// Samples -> coefficients on |k|_inf <= b (exact for inputs band-limited to n - 1 - b).
    BoxArray analyze(const BoxArray& samples, int b) const {
        Dense w(2 * b + 1, n);
        for (int k = -b; k <= b; ++k)
            for (int j = 0; j < n; ++j) w(k + b, j) = std::exp(-I * (2.0 * kPi * k * j / n)) / static_cast<double>(n);
        return transform_all_axes(samples, w);
    }
};

inline BoxArray to_box(const TrigPoly& t, int b) {
    BoxArray a(t.p(), 2 * b + 1);
    for (const auto& [k, v] : t.coeffs()) {
        if (linf(k) > b) continue;
        std::array<int, 3> idx{k[0] + b, k[1] + b, k[2] + b};
        a.data[a.flat(idx)] = v;
    }
    return a;
}

inline TrigPoly from_box(const BoxArray& a, double period, double drop = 0.0) {
    const int b = (a.n - 1) / 2;
    TrigPoly t(a.p, period);
    for (std::size_t f = 0; f < a.size(); ++f) {
        if (std::abs(a.data[f]) <= drop) continue;
        auto idx = a.unflat(f);
        Mode k{0, 0, 0};
        for (int ax = 0; ax < a.p; ++ax) k[static_cast<std::size_t>(ax)] = idx[static_cast<std::size_t>(ax)] - b;
        t.set(k, a.data[f]);
    }
    return t;
}

/// Fourier coefficients (|k|_inf <= b) of a function sampled on a grid.
inline TrigPoly project_function(const std::function<cd(const Point&)>& f, int p, double period, int b, int n_grid) {
    SamplingGrid g{p, n_grid, period};
    BoxArray s(p, n_grid);
    for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = f(g.point(i));
    return from_box(g.analyze(s, b), period);
}

}  // namespace sgeo

#endif  // SGEO_FOURIER_HPP
