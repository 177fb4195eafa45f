#ifndef SGEO_HOCHSCHILD_HPP
#define SGEO_HOCHSCHILD_HPP

// Hochschild chains over named algebra elements, the boundary b, the
// antisymmetrizer P, pi_D and the orientability check.

#include "sgeo/calculus.hpp"

#include <mutex>

namespace sgeo {

/// Named algebra elements, including composites created by products.
/// Composites with equal symbols share one name, so chain identities
/// that rely on commutativity cancel exactly.
class ElementRegistry {
public:
    explicit ElementRegistry(const TruncatedTriple& t) : t_(&t) {
        for (const auto& [n, e] : t.generators) elements_.emplace(n, e);
        const auto one = MatrixOperator::identity(t.hilbert_dim());
        Element unit{"1", one, std::nullopt, [](const Point&) { return cd(1.0); }};
        if (const auto* f = t.fourier()) unit.symbol = TrigPoly::constant(f->p(), f->period(), 1.0);
        elements_.emplace("1", unit);
    }

    ElementRegistry(const ElementRegistry&) = delete;
    ElementRegistry& operator=(const ElementRegistry&) = delete;

    const TruncatedTriple& triple() const { return *t_; }

    const Element& get(const std::string& name) const {
        std::lock_guard lock(mu_);
        auto it = elements_.find(name);
        if (it == elements_.end()) throw Error("unknown algebra element '" + name + "'");
        return it->second;
    }

    bool contains(const std::string& name) const {
        std::lock_guard lock(mu_);
        return elements_.count(name) > 0;
    }

    /// Registers an element; returns the name of an existing element with the same symbol if any.
    std::string add(Element e) {
        std::lock_guard lock(mu_);
        return add_locked(std::move(e));
    }

    /// Name of the product a*b, registering it when new.
    std::string product(const std::string& a, const std::string& b) {
        if (a == "1") return b;
        if (b == "1") return a;
        std::lock_guard lock(mu_);
        // names are sorted, space-separated factor lists (generator names may
        // contain '*'), so associativity and commutativity cancel even for
        // elements without a symbol
        std::vector<std::string> atoms = atoms_of(a);
        for (const auto& x : atoms_of(b)) atoms.push_back(x);
        std::sort(atoms.begin(), atoms.end());
        std::string name = "(";
        for (std::size_t i = 0; i < atoms.size(); ++i) name += (i ? " " : "") + atoms[i];
        name += ")";
        if (auto it = alias_.find(name); it != alias_.end()) return it->second;
        const Element& ea = elements_.at(a);
        const Element& eb = elements_.at(b);
        Element e;
        e.name = name;
        if (ea.symbol && eb.symbol && t_->fourier()) {
            e.symbol = (*ea.symbol) * (*eb.symbol);
            e.op = t_->fourier()->realize(*e.symbol);
            auto s = *e.symbol;
            e.value = [s](const Point& x) { return s(x); };
        } else {
            e.op = ea.op * eb.op;
            auto fa = ea.value, fb = eb.value;
            if (fa && fb) e.value = [fa, fb](const Point& x) { return fa(x) * fb(x); };
        }
        const std::string out = add_locked(std::move(e));
        alias_[name] = out;
        if (out == name) atoms_[out] = atoms;
        return out;
    }

private:
    std::vector<std::string> atoms_of(const std::string& n) const {
        if (auto it = atoms_.find(n); it != atoms_.end()) return it->second;
        return {n};
    }

    std::string add_locked(Element e) {
        if (e.symbol) {
            for (const auto& [n, x] : elements_)
                if (x.symbol && x.symbol->max_coeff_distance(*e.symbol) <= 1e-12) return n;
        }
        auto it = elements_.find(e.name);
        if (it != elements_.end()) return it->first;
        const std::string n = e.name;
        elements_.emplace(n, std::move(e));
        return n;
    }

    const TruncatedTriple* t_;
    mutable std::mutex mu_;
    std::map<std::string, Element> elements_;
    std::map<std::string, std::string> alias_;
    std::map<std::string, std::vector<std::string>> atoms_;
};

/// Formal combination of elementary tensors a^0 (x) ... (x) a^p.
class HochschildChain {
public:
    using Factors = std::vector<std::string>;

    HochschildChain() = default;
    explicit HochschildChain(int degree) : degree_(degree) {
        if (degree < 0) throw Error("HochschildChain: negative degree");
    }

    int degree() const { return degree_; }
    const std::map<Factors, cd>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    HochschildChain& add(cd coeff, Factors f) {
        if (static_cast<int>(f.size()) != degree_ + 1)
            throw Error("HochschildChain: term has " + std::to_string(f.size()) + " factors, expected " + std::to_string(degree_ + 1));
        const cd v = (terms_.count(f) ? terms_[f] : cd(0.0)) + coeff;
        if (std::abs(v) == 0.0) terms_.erase(f);
        else terms_[f] = v;
        return *this;
    }

    /// Drops terms with |coeff| <= tol.
    HochschildChain pruned(double tol) const {
        HochschildChain r(degree_);
        for (const auto& [f, c] : terms_)
            if (std::abs(c) > tol) r.terms_[f] = c;
        return r;
    }

    /// max |coeff|
    double norm() const {
        double m = 0.0;
        for (const auto& [f, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    friend HochschildChain operator+(const HochschildChain& a, const HochschildChain& b) {
        if (a.degree_ != b.degree_) throw Error("HochschildChain: degree mismatch");
        HochschildChain r = a;
        for (const auto& [f, c] : b.terms_) r.add(c, f);
        return r;
    }
    friend HochschildChain operator*(cd s, const HochschildChain& a) {
        HochschildChain r(a.degree_);
        for (const auto& [f, c] : a.terms_) r.add(s * c, f);
        return r;
    }
    friend HochschildChain operator-(const HochschildChain& a, const HochschildChain& b) { return a + cd(-1.0) * b; }

private:
    int degree_ = 0;
    std::map<Factors, cd> terms_;
};

/// Hochschild boundary, with the cyclic last term.
inline HochschildChain boundary(const HochschildChain& c, ElementRegistry& reg) {
    const int p = c.degree();
    if (p < 1) throw Error("boundary: degree 0 chain");
    HochschildChain r(p - 1);
    for (const auto& [f, coeff] : c.terms()) {
        for (int i = 0; i < p; ++i) {
            HochschildChain::Factors g;
            for (int j = 0; j < i; ++j) g.push_back(f[static_cast<std::size_t>(j)]);
            g.push_back(reg.product(f[static_cast<std::size_t>(i)], f[static_cast<std::size_t>(i + 1)]));
            for (int j = i + 2; j <= p; ++j) g.push_back(f[static_cast<std::size_t>(j)]);
            r.add((i % 2 == 0 ? 1.0 : -1.0) * coeff, g);
        }
        HochschildChain::Factors g{reg.product(f[static_cast<std::size_t>(p)], f[0])};
        for (int j = 1; j < p; ++j) g.push_back(f[static_cast<std::size_t>(j)]);
        r.add((p % 2 == 0 ? 1.0 : -1.0) * coeff, g);
    }
    return r;
}

/// P(a0 (x) a1 ... ap) = (1/p!) sum_beta sign(beta) a0 (x) a_beta(1) ... a_beta(p)
inline HochschildChain antisymmetrize(const HochschildChain& c) {
    const int p = c.degree();
    HochschildChain r(p);
    double fact = 1.0;
    for (int i = 2; i <= p; ++i) fact *= i;
    std::vector<int> perm(static_cast<std::size_t>(p));
    for (const auto& [f, coeff] : c.terms()) {
        std::iota(perm.begin(), perm.end(), 1);
        do {
            HochschildChain::Factors g{f[0]};
            for (int k : perm) g.push_back(f[static_cast<std::size_t>(k)]);
            r.add(static_cast<double>(permutation_sign(perm)) * coeff / fact, g);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return r.pruned(1e-15);
}

/// pi_D(a0 (x) ... (x) ap) = a0 [D,a1] ... [D,ap]
inline MatrixOperator pi_D(const HochschildChain& c, const TruncatedTriple& t, const ElementRegistry& reg) {
    if (c.degree() != t.p) throw Error("pi_D: chain degree " + std::to_string(c.degree()) + " differs from p = " + std::to_string(t.p));
    MatrixOperator acc = MatrixOperator::zero(t.hilbert_dim());
    std::map<std::string, MatrixOperator> brackets;
    for (const auto& [f, coeff] : c.terms()) {
        MatrixOperator prod = reg.get(f[0]).op;
        for (std::size_t j = 1; j < f.size(); ++j) {
            auto it = brackets.find(f[j]);
            if (it == brackets.end()) it = brackets.emplace(f[j], bracket_D(reg.get(f[j]).op, t)).first;
            prod = prod * it->second;
        }
        acc += coeff * prod;
    }
    return acc;
}

inline CheckReport orientability_check(const TruncatedTriple& t, const HochschildChain& c, ElementRegistry& reg) {
    CheckReport r;
    r.name = "orientability";
    if (c.degree() != t.p) {
        r.verdict = Verdict::fail;
        r.diagnostics.push_back("cycle degree differs from p");
        return r;
    }
    std::vector<Eigen::Index> idx;
    try {
        idx = inner_indices(t, t.p + 1);
    } catch (const BandExhausted& e) {
        r.diagnostics.push_back(e.what());
        return r;
    }
    r.residual("boundary", boundary(c, reg).norm(), 1e-9);
    r.residual("antisymmetry", (c - antisymmetrize(c)).norm(), 1e-12);
    MatrixOperator target = MatrixOperator::identity(t.hilbert_dim());
    if (t.p % 2 == 0) {
        if (!t.grading) {
            r.verdict = Verdict::fail;
            r.diagnostics.push_back("even p without a grading");
            return r;
        }
        const auto& g = *t.grading;
        target = g;
        r.residual("grading_selfadjoint", g.max_asymmetry(), 1e-12);
        r.residual("grading_square", (g * g - MatrixOperator::identity(g.dim())).max_abs(), 1e-12);
        r.residual("grading_anticommutes", anticommutator(g, t.D).max_abs(), 1e-12 * std::max(1.0, t.D.max_abs()));
        r.notes["target"] = "gamma";
    } else {
        r.notes["target"] = "1";
    }
    r.residual("pi_D", compressed_norm(pi_D(c, t, reg) - target, idx), 1e-9);
    r.decide_from_residuals();
    return r;
}

}  // namespace sgeo

#endif  // SGEO_HOCHSCHILD_HPP
