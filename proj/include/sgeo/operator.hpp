#ifndef SGEO_OPERATOR_HPP
#define SGEO_OPERATOR_HPP

// Complex operators on a truncated Hilbert space.
//
// Operators are stored as column-major sparse matrices. Every matrix that
// appears in the model geometries is either block diagonal (D and its
// functions) or banded in the Fourier basis (multiplication operators), so
// the sparse layout keeps the 8000-dimensional torus sections tractable
// while dense inputs still work unchanged.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgeo {

using cd = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Sparse = Eigen::SparseMatrix<cd, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<cd>;

inline constexpr cd I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Square complex matrix acting on the truncated Hilbert space.
class MatrixOperator {
public:
    MatrixOperator() = default;

    explicit MatrixOperator(Sparse m, bool hermitian = false)
        : m_(std::move(m)), hermitian_(hermitian) {
        if (m_.rows() != m_.cols())
            throw Error("MatrixOperator: matrix is not square");
        m_.makeCompressed();
    }

    static MatrixOperator from_dense(const Dense& d, double drop = 0.0) {
        Sparse s = d.sparseView(1.0, drop);
        // sparseView keeps entries with |v| > drop; exact zeros are dropped.
        return MatrixOperator(std::move(s));
    }

    static MatrixOperator identity(Eigen::Index n) {
        Sparse s(n, n);
        s.setIdentity();
        return MatrixOperator(std::move(s), true);
    }

    static MatrixOperator zero(Eigen::Index n) { return MatrixOperator(Sparse(n, n), true); }

    static MatrixOperator diagonal(const std::vector<double>& d) {
        const auto n = static_cast<Eigen::Index>(d.size());
        std::vector<Triplet> t;
        t.reserve(d.size());
        for (Eigen::Index i = 0; i < n; ++i)
            if (d[i] != 0.0) t.emplace_back(i, i, d[i]);
        Sparse s(n, n);
        s.setFromTriplets(t.begin(), t.end());
        return MatrixOperator(std::move(s), true);
    }

    static MatrixOperator diagonal(const Vector& d) {
        const auto n = d.size();
        std::vector<Triplet> t;
        for (Eigen::Index i = 0; i < n; ++i)
            if (d[i] != cd(0.0)) t.emplace_back(i, i, d[i]);
        Sparse s(n, n);
        s.setFromTriplets(t.begin(), t.end());
        return MatrixOperator(std::move(s));
    }

    Eigen::Index dim() const { return m_.rows(); }
    const Sparse& sparse() const { return m_; }
    Dense dense() const { return Dense(m_); }
    bool hermitian_flag() const { return hermitian_; }

    cd at(Eigen::Index r, Eigen::Index c) const { return m_.coeff(r, c); }

    MatrixOperator adjoint() const {
        return MatrixOperator(Sparse(m_.adjoint()), hermitian_);
    }

    /// max |A_ij - conj(A_ji)|
    double max_asymmetry() const {
        Sparse d = m_ - Sparse(m_.adjoint());
        double r = 0.0;
        for (Eigen::Index k = 0; k < d.outerSize(); ++k)
            for (Sparse::InnerIterator it(d, k); it; ++it) r = std::max(r, std::abs(it.value()));
        return r;
    }

    double max_abs() const {
        double r = 0.0;
        for (Eigen::Index k = 0; k < m_.outerSize(); ++k)
            for (Sparse::InnerIterator it(m_, k); it; ++it) r = std::max(r, std::abs(it.value()));
        return r;
    }

    double frobenius() const { return m_.norm(); }

    cd trace() const {
        cd s = 0.0;
        for (Eigen::Index k = 0; k < m_.outerSize(); ++k)
            for (Sparse::InnerIterator it(m_, k); it; ++it)
                if (it.row() == it.col()) s += it.value();
        return s;
    }

    bool is_hermitian(double tol = 1e-12) const { return max_asymmetry() <= tol; }

    /// Copy with the Hermitian flag set after verifying it.
    MatrixOperator as_hermitian(double tol = 1e-12) const {
        const double a = max_asymmetry();
        if (a > tol) throw Error("operator is not Hermitian (max asymmetry " + std::to_string(a) + ")");
        Sparse h = 0.5 * (m_ + Sparse(m_.adjoint()));
        return MatrixOperator(std::move(h), true);
    }

    /// Drop entries with |v| <= tol.
    MatrixOperator pruned(double tol) const {
        Sparse s = m_;
        s.prune([tol](const Eigen::Index&, const Eigen::Index&, const cd& v) { return std::abs(v) > tol; });
        return MatrixOperator(std::move(s), hermitian_);
    }

    /// Principal submatrix on the given (sorted) index set.
    MatrixOperator restrict_to(const std::vector<Eigen::Index>& idx) const {
        const auto n = dim();
        std::vector<Eigen::Index> pos(static_cast<std::size_t>(n), -1);
        for (std::size_t i = 0; i < idx.size(); ++i) pos[static_cast<std::size_t>(idx[i])] = static_cast<Eigen::Index>(i);
        std::vector<Triplet> t;
        for (Eigen::Index k = 0; k < m_.outerSize(); ++k) {
            const auto c = pos[static_cast<std::size_t>(k)];
            if (c < 0) continue;
            for (Sparse::InnerIterator it(m_, k); it; ++it) {
                const auto r = pos[static_cast<std::size_t>(it.row())];
                if (r >= 0) t.emplace_back(r, c, it.value());
            }
        }
        const auto m = static_cast<Eigen::Index>(idx.size());
        Sparse s(m, m);
        s.setFromTriplets(t.begin(), t.end());
        return MatrixOperator(std::move(s), hermitian_);
    }

    Vector apply(const Vector& v) const { return m_ * v; }

    friend MatrixOperator operator+(const MatrixOperator& a, const MatrixOperator& b) {
        check_dims(a, b);
        return MatrixOperator(Sparse(a.m_ + b.m_), a.hermitian_ && b.hermitian_);
    }
    friend MatrixOperator operator-(const MatrixOperator& a, const MatrixOperator& b) {
        check_dims(a, b);
        return MatrixOperator(Sparse(a.m_ - b.m_), a.hermitian_ && b.hermitian_);
    }
    friend MatrixOperator operator-(const MatrixOperator& a) { return MatrixOperator(Sparse(-a.m_), a.hermitian_); }
    friend MatrixOperator operator*(const MatrixOperator& a, const MatrixOperator& b) {
        check_dims(a, b);
        return MatrixOperator(Sparse(a.m_ * b.m_));
    }
    friend MatrixOperator operator*(cd s, const MatrixOperator& a) {
        return MatrixOperator(Sparse(s * a.m_), a.hermitian_ && s.imag() == 0.0);
    }
    friend MatrixOperator operator*(double s, const MatrixOperator& a) {
        return MatrixOperator(Sparse(s * a.m_), a.hermitian_);
    }
    MatrixOperator& operator+=(const MatrixOperator& b) { return *this = *this + b; }
    MatrixOperator& operator-=(const MatrixOperator& b) { return *this = *this - b; }

private:
    static void check_dims(const MatrixOperator& a, const MatrixOperator& b) {
        if (a.dim() != b.dim())
            throw Error("operator dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }

    Sparse m_;
    bool hermitian_ = false;
};

inline MatrixOperator commutator(const MatrixOperator& a, const MatrixOperator& b) { return a * b - b * a; }
inline MatrixOperator anticommutator(const MatrixOperator& a, const MatrixOperator& b) { return a * b + b * a; }

/// Kronecker product of two operators (a acts on the slow index).
inline MatrixOperator kron(const MatrixOperator& a, const MatrixOperator& b) {
    const auto na = a.dim(), nb = b.dim();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(a.sparse().nonZeros() * b.sparse().nonZeros()));
    for (Eigen::Index ka = 0; ka < a.sparse().outerSize(); ++ka)
        for (Sparse::InnerIterator ia(a.sparse(), ka); ia; ++ia)
            for (Eigen::Index kb = 0; kb < b.sparse().outerSize(); ++kb)
                for (Sparse::InnerIterator ib(b.sparse(), kb); ib; ++ib)
                    t.emplace_back(ia.row() * nb + ib.row(), ia.col() * nb + ib.col(), ia.value() * ib.value());
    Sparse s(na * nb, na * nb);
    s.setFromTriplets(t.begin(), t.end());
    return MatrixOperator(std::move(s), a.hermitian_flag() && b.hermitian_flag());
}

// ---------------------------------------------------------------------------
// Eigendecomposition

struct Eigensystem {
    std::vector<double> values;  // ascending
    MatrixOperator basis;        // columns are eigenvectors, in the order of `values`
};

namespace detail {

struct UnionFind {
    std::vector<Eigen::Index> parent;
    explicit UnionFind(Eigen::Index n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    }
    Eigen::Index find(Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    void unite(Eigen::Index a, Eigen::Index b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

/// Connected components of the sparsity graph, each sorted ascending.
inline std::vector<std::vector<Eigen::Index>> components(const Sparse& m) {
    UnionFind uf(m.rows());
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (Sparse::InnerIterator it(m, k); it; ++it)
            if (it.value() != cd(0.0)) uf.unite(it.row(), it.col());
    std::vector<Eigen::Index> label(static_cast<std::size_t>(m.rows()), -1);
    std::vector<std::vector<Eigen::Index>> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const auto r = uf.find(i);
        auto& l = label[static_cast<std::size_t>(r)];
        if (l < 0) {
            l = static_cast<Eigen::Index>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(l)].push_back(i);
    }
    return out;
}

}  // namespace detail

/// Largest connected block that eigendecompose() will factor densely.
inline constexpr Eigen::Index kMaxDenseBlock = 4096;

/// Hermitian eigendecomposition H = V diag(w) V*.
///
/// The sparsity graph is split into connected components and each block is
/// factored densely, so block-diagonal inputs cost O(sum of block^3).
inline Eigensystem eigendecompose(const MatrixOperator& h, double tol = 1e-10) {
    const double asym = h.max_asymmetry();
    const double scale = std::max(1.0, h.max_abs());
    if (asym > tol * scale)
        throw Error("eigendecompose: input is not Hermitian (max asymmetry " + std::to_string(asym) + ")");

    const auto n = h.dim();
    const auto comps = detail::components(h.sparse());
    struct Pair {
        double value;
        Eigen::Index comp, local;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    std::vector<Dense> vecs(comps.size());

    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto& idx = comps[c];
        const auto m = static_cast<Eigen::Index>(idx.size());
        if (m == 1) {
            pairs.push_back({h.at(idx[0], idx[0]).real(), static_cast<Eigen::Index>(c), 0});
            vecs[c] = Dense::Ones(1, 1);
            continue;
        }
        if (m > kMaxDenseBlock)
            throw Error("eigendecompose: connected block of size " + std::to_string(m) + " exceeds dense limit");
        Dense block = h.restrict_to(idx).dense();
        block = 0.5 * (block + block.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Dense> es(block);
        if (es.info() != Eigen::Success) throw Error("eigendecompose: solver failed");
        for (Eigen::Index j = 0; j < m; ++j) pairs.push_back({es.eigenvalues()[j], static_cast<Eigen::Index>(c), j});
        vecs[c] = es.eigenvectors();
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });

    Eigensystem out;
    out.values.reserve(pairs.size());
    std::vector<Triplet> t;
    for (std::size_t col = 0; col < pairs.size(); ++col) {
        const auto& p = pairs[col];
        out.values.push_back(p.value);
        const auto& idx = comps[static_cast<std::size_t>(p.comp)];
        const auto& v = vecs[static_cast<std::size_t>(p.comp)];
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const cd x = v(static_cast<Eigen::Index>(r), p.local);
            if (x != cd(0.0)) t.emplace_back(idx[r], static_cast<Eigen::Index>(col), x);
        }
    }
    Sparse b(n, n);
    b.setFromTriplets(t.begin(), t.end());
    out.basis = MatrixOperator(std::move(b));
    return out;
}

/// basis * diag(f(values)) * basis^*
inline MatrixOperator reconstruct(const Eigensystem& es, const std::function<double(double)>& f) {
    std::vector<double> d(es.values.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = f(es.values[i]);
    MatrixOperator r = es.basis * MatrixOperator::diagonal(d) * es.basis.adjoint();
    return MatrixOperator(r.sparse(), true).pruned(0.0);
}

inline MatrixOperator functional_calculus(const MatrixOperator& h, const std::function<double(double)>& f) {
    return reconstruct(eigendecompose(h), f);
}

// ---------------------------------------------------------------------------
// Norms

/// Below this dimension operator norms are computed exactly (dense spectrum of X*X).
inline constexpr Eigen::Index kDenseNormLimit = 300;

/// Largest singular value from the dense spectrum of X*X.
inline double op_norm_exact(const MatrixOperator& x) {
    if (x.dim() == 0 || x.sparse().nonZeros() == 0) return 0.0;
    if (x.dim() > kMaxDenseBlock) throw Error("op_norm_exact: matrix too large");
    const Dense d = x.dense();
    const Dense g = d.adjoint() * d;
    Eigen::SelfAdjointEigenSolver<Dense> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Largest singular value. Exact for dim <= kDenseNormLimit, power iteration on X*X above.
inline double op_norm(const MatrixOperator& x) {
    const auto n = x.dim();
    if (n == 0 || x.sparse().nonZeros() == 0) return 0.0;
    if (n <= kDenseNormLimit) return op_norm_exact(x);
    // Power iteration with a fixed seed so repeated runs agree bit for bit.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cd(nd(rng), nd(rng));
    v.normalize();
    const Sparse& m = x.sparse();
    const Sparse ma = m.adjoint();
    double prev = 0.0, est = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Vector w = ma * (m * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        est = std::sqrt(nw);
        v = w / nw;
        if (it > 20 && std::abs(est - prev) <= 1e-12 * est) break;
        prev = est;
    }
    return (m * v).norm();
}

/// Norm of the compression P X P onto an index set.
inline double compressed_norm(const MatrixOperator& x, const std::vector<Eigen::Index>& idx) {
    if (idx.empty()) return 0.0;
    return op_norm(x.restrict_to(idx));
}

/// Singular values, descending.
inline std::vector<double> singular_values(const MatrixOperator& t) {
    if (t.hermitian_flag() || t.is_hermitian(1e-12)) {
        const auto es = eigendecompose(t.as_hermitian(1e-10));
        std::vector<double> s;
        s.reserve(es.values.size());
        for (double v : es.values) s.push_back(std::abs(v));
        std::sort(s.begin(), s.end(), std::greater<>());
        return s;
    }
    if (t.dim() > kMaxDenseBlock) throw Error("singular_values: matrix too large for a dense SVD");
    Eigen::BDCSVD<Dense> svd(t.dense());
    const auto& sv = svd.singularValues();
    std::vector<double> s(sv.data(), sv.data() + sv.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

/// Deterministic random Hermitian matrix with entries of unit variance.
inline Dense random_hermitian(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Dense a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) = cd(nd(rng), nd(rng));
    return 0.5 * (a + a.adjoint());
}

inline Dense random_unitary(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Dense a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) a(i, j) = cd(nd(rng), nd(rng));
    Eigen::HouseholderQR<Dense> qr(a);
    return qr.householderQ();
}

}  // namespace sgeo

#endif  // SGEO_OPERATOR_HPP
