#ifndef SGEO_GEOMETRIES_HPP
#define SGEO_GEOMETRIES_HPP

// Model triples: circle, flat tori, the interval with boundary conditions,
// products with a finite ladder, and deterministic corruptions of each.

#include "sgeo/hochschild.hpp"

#include <set>

namespace sgeo {

struct GeometrySpec {
    std::string kind = "circle";
    int p = 1;
    int lambda = 64;
    std::map<std::string, std::string> options;

    std::string option(const std::string& key, const std::string& fallback) const {
        auto it = options.find(key);
        return it == options.end() ? fallback : it->second;
    }
};

/// A triple together with its orientation cycle and bookkeeping.
struct Model {
    TruncatedTriple triple;
    std::optional<HochschildChain> cycle;
    std::map<std::string, std::string> provenance;
    /// for corrupted models: checks expected to fail / required to pass
    std::set<std::string> targets;
    std::set<std::string> must_pass;
};

// ---------------------------------------------------------------------------
// Clifford data

inline Dense pauli(int k) {
    Dense s = Dense::Zero(2, 2);
    switch (k) {
        case 1: s(0, 1) = s(1, 0) = 1.0; break;
        case 2: s(0, 1) = -I; s(1, 0) = I; break;
        case 3: s(0, 0) = 1.0; s(1, 1) = -1.0; break;
        default: throw Error("pauli: index must be 1, 2 or 3");
    }
    return s;
}

/// Clifford action c(v) = v^ - i_v on the exterior algebra of R^2,
/// basis {1, e1, e2, e12}.
inline std::array<Dense, 2> exterior_clifford() {
    Dense ext1 = Dense::Zero(4, 4), ext2 = Dense::Zero(4, 4);
    ext1(1, 0) = 1.0;   // 1 -> e1
    ext1(3, 2) = 1.0;   // e2 -> e12
    ext2(2, 0) = 1.0;   // 1 -> e2
    ext2(3, 1) = -1.0;  // e1 -> -e12
    // interior products are the adjoints of the exterior ones
    return {Dense(ext1 - ext1.adjoint()), Dense(ext2 - ext2.adjoint())};
}

/// Hodge star on the basis {1, e1, e2, e12} of the exterior algebra of R^2.
inline Dense hodge_star_2d() {
    Dense s = Dense::Zero(4, 4);
    s(3, 0) = 1.0;   // *1 = e12
    s(2, 1) = 1.0;   // *e1 = e2
    s(1, 2) = -1.0;  // *e2 = -e1
    s(0, 3) = 1.0;   // *e12 = 1
    return s;
}

// ---------------------------------------------------------------------------

namespace detail {

/// D on a Fourier space from Clifford symbols: D e_k = sum_mu gamma^mu (2 pi i k_mu / L) e_k.
inline MatrixOperator fourier_dirac(const FourierSpace& fs, const std::vector<Dense>& gammas) {
    const int N = fs.spinor_dim();
    const double w = 2.0 * kPi / fs.period();
    std::vector<Triplet> t;
    const auto& modes = fs.mode_labels();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        Dense b = Dense::Zero(N, N);
        for (std::size_t mu = 0; mu < gammas.size(); ++mu) b += gammas[mu] * (I * w * static_cast<double>(modes[m][mu]));
        for (int r = 0; r < N; ++r)
            for (int s = 0; s < N; ++s)
                if (b(r, s) != cd(0.0)) t.emplace_back(static_cast<Eigen::Index>(m) * N + r, static_cast<Eigen::Index>(m) * N + s, b(r, s));
    }
    Sparse d(fs.dim(), fs.dim());
    d.setFromTriplets(t.begin(), t.end());
    return MatrixOperator(std::move(d), true);
}

inline MatrixOperator fiber_constant(const FourierSpace& fs, const Dense& g) {
    return fs.realize_blocks({{Mode{0, 0, 0}, g}});
}

inline std::string axis_name(const std::string& base, int mu) { return base + std::to_string(mu + 1); }

/// Orientation cycle kappa * sum_beta sign(beta) (u_1...u_p)^* (x) u_beta(1) (x) ... (x) u_beta(p),
/// with kappa fixed from the Clifford symbols so that pi_D(c) is 1 (p odd) or gamma (p even).
inline HochschildChain fourier_cycle(const TruncatedTriple& t, const std::string& a0, const std::vector<std::string>& us) {
    const auto& fs = t.require_fourier("orientation cycle");
    const int p = t.p;
    const int N = fs.spinor_dim();
    const Dense mc = multicommutator(t.clifford);
    const Dense target = (p % 2 == 0) ? *t.fiber_grading : Dense::Identity(N, N);
    const cd c = (target.adjoint() * mc).trace() / static_cast<double>(N);
    if ((mc - c * target).norm() > 1e-12 * std::max(1.0, mc.norm()))
        throw Error("Clifford multicommutator is not proportional to the orientation target");
    const cd step = I * (2.0 * kPi / fs.period());
    const cd kappa = 1.0 / (std::pow(step, p) * c);
    HochschildChain chain(p);
    std::vector<int> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        HochschildChain::Factors f{a0};
        for (int k : perm) f.push_back(us[static_cast<std::size_t>(k)]);
        chain.add(static_cast<double>(permutation_sign(perm)) * kappa, f);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return chain;
}

}  // namespace detail

/// Circle of length 2 pi: e_n, |n| <= lambda, D = -i d/dtheta = diag(n), u = exp(i theta).
inline Model circle(int lambda) {
    if (lambda < 1) throw Error("circle: lambda must be positive");
    auto fs = std::make_shared<FourierSpace>(1, lambda, 2.0 * kPi, 1);
    Model m;
    auto& t = m.triple;
    t.space = fs;
    t.label = "circle";
    t.p = 1;
    t.clifford = {Dense::Constant(1, 1, -I)};
    t.D = detail::fourier_dirac(*fs, t.clifford);
    const double L = 2.0 * kPi;
    t.generators.emplace("u", fs->element("u", TrigPoly::monomial(1, L, {1, 0, 0})));
    t.generators.emplace("u*", fs->element("u*", TrigPoly::monomial(1, L, {-1, 0, 0})));
    t.generators.emplace("cos", fs->element("cos", TrigPoly::cosine(1, L, 0)));
    t.generators.emplace("sin", fs->element("sin", TrigPoly::sine(1, L, 0)));
    t.band = {lambda, 1};
    t.set_complete_spectrum_bound(lambda);
    t.refine = [](int l) { return circle(l).triple; };
    t.finalize();
    m.cycle = HochschildChain(1).add(1.0, {"u*", "u"});
    m.provenance["geometry"] = "circle";
    m.provenance["lambda"] = std::to_string(lambda);
    return m;
}

/// Flat torus R^p / Z^p. variant "dirac": spinors C^2 with gamma^mu = i sigma_mu;
/// variant "signature" (p = 2): exterior algebra with c(v) = v^ - i_v.
inline Model torus(int p, int lambda, const std::string& variant = "dirac") {
    if (p != 2 && p != 3) throw Error("torus: p must be 2 or 3");
    if (lambda < 1) throw Error("torus: lambda must be positive");
    std::vector<Dense> gammas;
    std::optional<Dense> grading;
    if (variant == "dirac") {
        for (int mu = 1; mu <= p; ++mu) gammas.push_back(I * pauli(mu));
        if (p == 2) grading = pauli(3);
    } else if (variant == "signature") {
        if (p != 2) throw Error("torus: the signature variant is built for p = 2");
        const auto c = exterior_clifford();
        gammas = {c[0], c[1]};
        grading = Dense(I * c[0] * c[1]);
    } else {
        throw Error("torus: unknown variant '" + variant + "'");
    }
    const int N = static_cast<int>(gammas.front().rows());
    auto fs = std::make_shared<FourierSpace>(p, lambda, 1.0, N);
    Model m;
    auto& t = m.triple;
    t.space = fs;
    t.label = "torus";
    t.p = p;
    t.clifford = gammas;
    t.fiber_grading = grading;
    t.D = detail::fourier_dirac(*fs, gammas);
    if (grading) t.grading = MatrixOperator(detail::fiber_constant(*fs, *grading).sparse(), true);
    std::vector<std::string> us;
    TrigPoly prod_conj = TrigPoly::constant(p, 1.0, 1.0);
    std::string a0;
    for (int mu = 0; mu < p; ++mu) {
        Mode k{0, 0, 0};
        k[static_cast<std::size_t>(mu)] = 1;
        const auto u = detail::axis_name("u", mu);
        t.generators.emplace(u, fs->element(u, TrigPoly::monomial(p, 1.0, k)));
        t.generators.emplace(u + "*", fs->element(u + "*", TrigPoly::monomial(p, 1.0, -k)));
        t.generators.emplace(detail::axis_name("cos", mu), fs->element(detail::axis_name("cos", mu), TrigPoly::cosine(p, 1.0, mu)));
        t.generators.emplace(detail::axis_name("sin", mu), fs->element(detail::axis_name("sin", mu), TrigPoly::sine(p, 1.0, mu)));
        us.push_back(u);
        prod_conj = prod_conj * TrigPoly::monomial(p, 1.0, -k);
        a0 += u + "*";
    }
    t.generators.emplace(a0, fs->element(a0, prod_conj));
    t.band = {lambda, 1};
    t.set_complete_spectrum_bound(2.0 * kPi * lambda);
    t.refine = [p, variant](int l) { return torus(p, l, variant).triple; };
    t.finalize();
    m.cycle = detail::fourier_cycle(t, a0, us);
    m.provenance["geometry"] = "torus";
    m.provenance["p"] = std::to_string(p);
    m.provenance["lambda"] = std::to_string(lambda);
    m.provenance["variant"] = variant;
    m.provenance["orientation"] = p == 2 ? "gamma = i c(e1) c(e2) = sigma_3 on spinors" : "pi_D(c) = 1";
    return m;
}

/// L^2([0,1], C^2) with D = ((0, d/dx), (-d/dx, 0)), xi_1(0) = 0, xi_2(1) = 0,
/// in its eigenbasis truncated to n_modes frequencies; generators x and x^2.
inline Model interval_counterexample(int n_modes) {
    if (n_modes < 2) throw Error("interval_counterexample: need at least 2 modes");
    auto is = std::make_shared<IntervalSpace>(n_modes);
    Model m;
    auto& t = m.triple;
    t.space = is;
    t.label = "interval";
    t.p = 1;
    std::vector<double> ev(static_cast<std::size_t>(is->dim()));
    for (Eigen::Index i = 0; i < is->dim(); ++i) ev[static_cast<std::size_t>(i)] = IntervalSpace::eigenvalue(i);
    t.D = MatrixOperator::diagonal(ev);
    t.generators.emplace("x", is->multiplication("x", [](const Point& x) { return cd(x[0]); }, 0));
    t.generators.emplace("x2", is->multiplication("x2", [](const Point& x) { return cd(x[0] * x[0]); }, 0));
    t.banded = false;
    t.band = {n_modes - 1, std::max(1, n_modes / 8)};
    t.set_complete_spectrum_bound(IntervalSpace::frequency(n_modes - 1));
    t.refine = [](int l) { return interval_counterexample(l + 1).triple; };
    t.finalize();
    m.provenance["geometry"] = "interval";
    m.provenance["modes"] = std::to_string(n_modes);
    m.provenance["expected"] = "regularity and maximum principle fail";
    return m;
}

// ---------------------------------------------------------------------------
// Products

/// Space H (x) C^L; the ladder index is the fastest.
class ProductSpace : public FunctionSpace {
public:
    ProductSpace(std::shared_ptr<const FunctionSpace> base, int ladder) : base_(std::move(base)), L_(ladder) {}

    std::string kind() const override { return "product"; }
    int coord_dim() const override { return base_->coord_dim(); }
    Eigen::Index dim() const override { return base_->dim() * L_; }
    int spinor_dim() const override { return base_->spinor_dim() * L_; }
    int fiber_dim() const override { return base_->fiber_dim() * L_; }
    const std::vector<Mode>& mode_labels() const override { return base_->mode_labels(); }
    int lambda() const override { return base_->lambda(); }

    MatrixOperator fiber_multiplication(const std::function<Dense(const Point&)>&, int) const override {
        throw Error("product space: fiber multiplication is not provided");
    }
    Element multiplication(const std::string& name, const std::function<cd(const Point&)>& f, int bw) const override {
        auto e = base_->multiplication(name, f, bw);
        e.op = kron(e.op, MatrixOperator::identity(L_));
        e.symbol.reset();
        return e;
    }
    Vector fiber_values(const Vector&, const Point&) const override {
        throw Error("product space: fiber values are not provided");
    }
    std::vector<Point> sample_points(int n) const override { return base_->sample_points(n); }
    double distance(const Point& x, const Point& y) const override { return base_->distance(x, y); }

private:
    std::shared_ptr<const FunctionSpace> base_;
    int L_;
};

/// D'' = D (x) 1 + gamma (x) D' with D' = diag(ladder).
inline Model product_triple(const TruncatedTriple& t, const std::vector<double>& ladder) {
    if (!t.grading) throw Error("product_triple: the first factor must be even");
    if (ladder.empty()) throw Error("product_triple: empty ladder");
    const auto L = static_cast<Eigen::Index>(ladder.size());
    Model m;
    auto& r = m.triple;
    r.space = std::make_shared<ProductSpace>(t.space, static_cast<int>(L));
    r.label = t.label + "xF" + std::to_string(L);
    r.p = t.p;
    r.D = MatrixOperator((kron(t.D, MatrixOperator::identity(L)) + kron(*t.grading, MatrixOperator::diagonal(ladder))).sparse(), true);
    for (const auto& [n, e] : t.generators) {
        Element g = e;
        g.op = kron(e.op, MatrixOperator::identity(L));
        g.symbol.reset();
        r.generators.emplace(n, g);
    }
    r.band = t.band;
    r.kernel_shift = t.kernel_shift;
    r.banded = t.banded;
    double top = 0.0;
    for (double d : ladder) top = std::max(top, std::abs(d));
    r.set_complete_spectrum_bound(t.complete_spectrum_bound());
    r.finalize();
    m.provenance["geometry"] = "product";
    m.provenance["ladder_length"] = std::to_string(L);
    m.provenance["ladder_top"] = std::to_string(top);
    return m;
}

// ---------------------------------------------------------------------------
// Corruptions

inline const std::vector<std::string>& corruption_modes() {
    static const std::vector<std::string> modes{"dense_D", "order_one_break", "grading_break", "cycle_scale"};
    return modes;
}

inline constexpr Eigen::Index kMaxDenseCorruption = 2000;

/// Deterministic perturbation of a model. The targeted check must fail; the
/// checks listed in must_pass are unaffected by construction.
inline Model corrupt(const Model& in, const std::string& mode, std::uint64_t seed = 7) {
    Model m = in;
    auto& t = m.triple;
    const auto n = t.hilbert_dim();
    if (mode == "dense_D") {
        if (n > kMaxDenseCorruption) throw Error("corrupt: dense_D needs dim <= 2000, got " + std::to_string(n));
        Dense r = random_hermitian(n, seed);
        if (t.grading) {
            // keep gamma D = -D gamma
            const Dense g = t.grading->dense();
            r = 0.5 * (r - g * r * g);
        }
        Eigen::SelfAdjointEigenSolver<Dense> es(r, Eigen::EigenvaluesOnly);
        const double nr = es.eigenvalues().cwiseAbs().maxCoeff();
        t.D = MatrixOperator((t.D + MatrixOperator::from_dense((0.05 / nr) * r)).sparse(), true).as_hermitian();
        m.targets = {"order_one"};
        m.must_pass = {"triple_invariants", "dimension"};
        m.provenance["collateral"] = "orientability, symbol_commutation";
    } else if (mode == "order_one_break") {
        const double eps = 1.0 / (40.0 * t.band.lambda_full);
        t.D = MatrixOperator((t.D + eps * (t.D * t.abs_D())).sparse(), true).as_hermitian(1e-9);
        m.targets = {"order_one"};
        m.must_pass = {"triple_invariants", "dimension"};
        m.provenance["collateral"] = "orientability, symbol_commutation";
    } else if (mode == "grading_break") {
        if (!t.grading) throw Error("corrupt: grading_break needs a grading");
        const int N = t.spinor_dim();
        Dense s1 = Dense::Zero(N, N);
        for (int i = 0; i + 1 < N; i += 2) s1(i, i + 1) = s1(i + 1, i) = 1.0;
        const auto& fs = t.require_fourier("grading_break");
        t.grading = MatrixOperator((*t.grading + 0.1 * detail::fiber_constant(fs, s1)).sparse(), true);
        m.targets = {"triple_invariants"};
        m.must_pass = {"order_one", "dimension"};
    } else if (mode == "cycle_scale") {
        if (!m.cycle) throw Error("corrupt: cycle_scale needs a cycle");
        m.cycle = cd(2.0) * *m.cycle;
        m.targets = {"orientability"};
        m.must_pass = {"triple_invariants", "order_one", "dimension"};
    } else {
        throw Error("corrupt: unknown mode '" + mode + "'");
    }
    t.refine = nullptr;
    t.finalize();
    m.provenance["corruption"] = mode;
    m.provenance["corruption_seed"] = std::to_string(seed);
    return m;
}

// ---------------------------------------------------------------------------

inline Model build(const GeometrySpec& spec) {
    if (spec.p < 1 || spec.p > 3) throw Error("geometry: p must be 1, 2 or 3");
    if (spec.lambda < 8) throw Error("geometry: lambda must be at least 8");
    Model m;
    if (spec.kind == "circle") {
        if (spec.p != 1) throw Error("geometry: the circle has p = 1");
        m = circle(spec.lambda);
    } else if (spec.kind == "torus") {
        m = torus(spec.p, spec.lambda, spec.option("variant", "dirac"));
    } else if (spec.kind == "interval") {
        m = interval_counterexample(spec.lambda);
    } else if (spec.kind == "product") {
        auto base = torus(2, spec.lambda, spec.option("variant", "dirac"));
        const int len = std::stoi(spec.option("ladder_length", "2"));
        const double stepv = std::stod(spec.option("ladder_step", "1.0"));
        std::vector<double> ladder;
        for (int i = 0; i < len; ++i) ladder.push_back(stepv * i);
        m = product_triple(base.triple, ladder);
    } else {
        throw Error("geometry: unknown kind '" + spec.kind + "'");
    }
    if (auto ks = spec.options.find("kernel_shift"); ks != spec.options.end()) {
        m.triple.kernel_shift = std::stod(ks->second);
        if (!(m.triple.kernel_shift > 0.0)) throw Error("geometry: kernel_shift must be positive");
        m.triple.finalize();
    }
    if (auto c = spec.options.find("corrupt"); c != spec.options.end()) m = corrupt(m, c->second);
    return m;
}

}  // namespace sgeo

#endif  // SGEO_GEOMETRIES_HPP
