#ifndef SGEO_VOICULESCU_HPP
#define SGEO_VOICULESCU_HPP

// The obstruction k_J over the cutoffs A = f(eps|D|), its localization to a
// region K, and the commutator estimate ||[f(eps|D|), a]|| <= C_f eps ||[D,a]||.

#include "sgeo/dixmier.hpp"

namespace sgeo {

struct ObstructionEstimate {
    std::vector<std::pair<double, double>> per_epsilon;  // (eps, max_j ||[A_eps, a_j]||_(p,1)), eps ascending
    std::vector<long> ranks;                             // rank A_eps
    double value = 0.0;
    bool regime_ok = false;
    std::vector<double> remainder;   // localized only: derivation remainder per eps
    double remainder_order = 0.0;    // slope of log remainder against log eps
    std::map<std::string, double> extras;
};

struct ObstructionOptions {
    std::vector<double> eps;  // empty: 10 points from the band guard up by a factor 8
    double plateau_spread = 0.1;
};

namespace detail {

/// eps with f(eps|D|) supported strictly inside the complete spectrum, ascending.
inline std::vector<double> valid_eps(const TruncatedTriple& t, const Cutoff& f, std::vector<double> eps, double& guard) {
    double edge = t.complete_spectrum_bound();
    if (!std::isfinite(edge)) edge = t.abs_spectrum().first.back();
    // one generator step must stay inside the band as well
    edge *= static_cast<double>(t.band.inner(1)) / t.band.lambda_full;
    guard = f.u_max / edge;
    if (eps.empty())
        for (int i = 0; i < 10; ++i) eps.push_back(1.25 * guard * std::pow(8.0, i / 9.0));
    std::sort(eps.begin(), eps.end());
    std::vector<double> out;
    for (double e : eps)
        if (e >= guard) out.push_back(e);
    return out;
}

inline std::vector<double> dense_singular_values(const Dense& x) {
    std::vector<double> s;
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if ((x + x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale || (x - x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
        const bool anti = (x + x.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
        const Dense h = anti ? Dense(0.5 * I * (x - x.adjoint())) : Dense(0.5 * (x + x.adjoint()));
        Eigen::SelfAdjointEigenSolver<Dense> es(h, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s.push_back(std::abs(es.eigenvalues()[i]));
    } else {
        Eigen::BDCSVD<Dense> svd(x);
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) s.push_back(svd.singularValues()[i]);
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

inline double dense_lp1(const Dense& x, double p) {
    SingularValueProfile prof;
    prof.mu = dense_singular_values(x);
    double acc = 0.0;
    for (double m : prof.mu) prof.sigma.push_back(acc += m);
    return lp1_norm(prof, p).primary;
}

/// Rows and columns carrying nonzero entries; the compression keeps all singular values.
inline MatrixOperator support_compression(const MatrixOperator& x) {
    std::vector<char> used(static_cast<std::size_t>(x.dim()), 0);
    const auto& s = x.sparse();
    for (Eigen::Index c = 0; c < s.outerSize(); ++c)
        for (Sparse::InnerIterator it(s, c); it; ++it)
            if (std::abs(it.value()) > 0.0) used[static_cast<std::size_t>(c)] = used[static_cast<std::size_t>(it.row())] = 1;
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (used[i]) idx.push_back(static_cast<Eigen::Index>(i));
    return x.restrict_to(idx);
}

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    return least_squares(lx, ly).slope;
}

inline void finish(ObstructionEstimate& e, const ObstructionOptions& opt) {
    e.value = std::numeric_limits<double>::infinity();
    for (const auto& [eps, v] : e.per_epsilon) e.value = std::min(e.value, v);
    // plateau or decay across the three smallest eps
    const std::size_t k = std::min<std::size_t>(3, e.per_epsilon.size());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        lo = std::min(lo, e.per_epsilon[i].second);
        hi = std::max(hi, e.per_epsilon[i].second);
    }
    const bool plateau = hi <= (1.0 + opt.plateau_spread) * lo;
    bool decay = k >= 2;
    for (std::size_t i = 1; i < k; ++i) decay = decay && e.per_epsilon[i - 1].second <= e.per_epsilon[i].second;
    e.regime_ok = plateau || decay || hi == 0.0;
}

}  // namespace detail

/// k_J estimate over A_eps = f(eps|D|): min over valid eps of max_j ||[A_eps, a_j]||_(p,1).
inline ObstructionEstimate kj_estimate(const std::vector<Element>& a_list, const TruncatedTriple& t, const Cutoff& f,
                                       const ObstructionOptions& opt = {}) {
    for (const auto& a : a_list)
        if (!a.op.is_hermitian(1e-10)) throw Error("kj_estimate: element " + a.name + " is not Hermitian");
    double guard = 0.0;
    const auto eps = detail::valid_eps(t, f, opt.eps, guard);
    if (eps.empty()) throw Error("kj_estimate: every eps is below the band guard");
    ObstructionEstimate e;
    e.extras["eps_guard"] = guard;
    for (double ep : eps) {
        long rank = 0;
        for (double v : t.eigensystem().values)
            if (detail::clamp01(f.f(ep * std::abs(v))) > 0.0) ++rank;
        const auto A = reconstruct(t.eigensystem(), [&](double v) { return detail::clamp01(f.f(ep * std::abs(v))); }).pruned(1e-15);
        double worst = 0.0;
        for (const auto& a : a_list) {
            const auto c = detail::support_compression(commutator(A, a.op).pruned(1e-15));
            if (c.dim() == 0) continue;
            worst = std::max(worst, detail::dense_lp1(c.dense(), t.p));
        }
        e.per_epsilon.emplace_back(ep, worst);
        e.ranks.push_back(rank);
    }
    detail::finish(e, opt);
    return e;
}

// ---------------------------------------------------------------------------
// Localization

/// A region of the base given by its distance function (0 inside).
struct Region {
    std::string name;
    std::function<double(const Point&)> distance;

    bool contains(const Point& x) const { return distance(x) <= 0.0; }
};

inline Region full_region() { return {"full", [](const Point&) { return 0.0; }}; }
inline Region empty_region() { return {"empty", [](const Point&) { return std::numeric_limits<double>::infinity(); }}; }

/// Closed arc of the given length centred at c on the circle of length 2 pi.
inline Region arc(double center, double length) {
    return {"arc", [center, length](const Point& x) {
                double d = std::fmod(std::abs(x[0] - center), 2.0 * kPi);
                d = std::min(d, 2.0 * kPi - d);
                return std::max(0.0, d - 0.5 * length);
            }};
}

/// b = 1 on K, decaying smoothly to 0 over distance w.
inline std::function<double(const Point&)> plateau(const Region& k, double w) {
    return [k, w](const Point& x) {
        const double d = k.distance(x) / w;
        if (d <= 0.0) return 1.0;
        if (d >= 1.0) return 0.0;
        // smooth step built from exp(-1/s)
        const auto g = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
        return g(1.0 - d) / (g(1.0 - d) + g(d));
    };
}

namespace detail {

/// Unitary from Fourier coefficients to normalized samples on the (2 lambda + 1)^p grid, tensored with C^N.
inline Dense position_transform(const FourierSpace& fs) {
    const int n = 2 * fs.lambda() + 1;
    const int N = fs.spinor_dim();
    const SamplingGrid g{fs.p(), n, fs.period()};
    const auto& modes = fs.mode_labels();
    const auto npts = static_cast<Eigen::Index>(g.size());
    const double w = 2.0 * kPi / fs.period();
    const double norm = 1.0 / std::sqrt(static_cast<double>(npts));
    Dense F = Dense::Zero(npts * N, fs.dim());
    for (Eigen::Index j = 0; j < npts; ++j) {
        const Point x = g.point(static_cast<std::size_t>(j));
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const auto& k = modes[m];
            const cd e = norm * std::exp(I * w * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
            for (int s = 0; s < N; ++s) F(j * N + s, static_cast<Eigen::Index>(m) * N + s) = e;
        }
    }
    return F;
}

/// Grid multiplication F* diag(g(x_j)) F.
inline Dense grid_multiplication(const Dense& F, const FourierSpace& fs, const std::function<cd(const Point&)>& g) {
    const int n = 2 * fs.lambda() + 1;
    const int N = fs.spinor_dim();
    const SamplingGrid grid{fs.p(), n, fs.period()};
    Eigen::VectorXcd d(F.rows());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const cd v = g(grid.point(j));
        for (int s = 0; s < N; ++s) d[static_cast<Eigen::Index>(j) * N + s] = v;
    }
    return F.adjoint() * d.asDiagonal() * F;
}

}  // namespace detail

struct LocalizedOptions {
    ObstructionOptions base;
    std::vector<double> plateau_widths{0.4, 0.3, 0.2};  // family of b; the first enters the remainder
};

/// k_J of {a_j 1_K} with R_eps = 1_K f(eps|D|) 1_K. 1_K is the sharp mask on the
/// (2 lambda + 1)^p position grid conjugated to the Fourier basis, which is an
/// exact projection commuting with the grid action of the algebra.
inline ObstructionEstimate localized_kj(const std::vector<Element>& a_list, const Region& K, const TruncatedTriple& t,
                                        const Cutoff& f, const LocalizedOptions& opt = {}) {
    const auto& fs = t.require_fourier("localized_kj");
    for (const auto& a : a_list)
        if (!a.value) throw Error("localized_kj: element " + a.name + " has no pointwise values");
    double guard = 0.0;
    const auto eps = detail::valid_eps(t, f, opt.base.eps, guard);
    if (eps.empty()) throw Error("localized_kj: every eps is below the band guard");
    ObstructionEstimate e;
    e.extras["eps_guard"] = guard;

    const Dense F = detail::position_transform(fs);
    const Dense P = detail::grid_multiplication(F, fs, [&](const Point& x) { return cd(K.contains(x) ? 1.0 : 0.0); });
    const double trace_p = P.trace().real();
    e.extras["mask_rank"] = std::round(trace_p);
    if (trace_p < 0.5) {
        for (double ep : eps) {
            e.per_epsilon.emplace_back(ep, 0.0);
            e.ranks.push_back(0);
            e.remainder.push_back(0.0);
        }
        e.regime_ok = true;
        e.extras["empty_region"] = 1.0;
        return e;
    }
    // distance of the grid projection from the Toeplitz compression of 1_K
    {
        const auto toe = fs.multiplication("1_K", [&](const Point& x) { return cd(K.contains(x) ? 1.0 : 0.0); }, 2 * fs.lambda());
        e.extras["toeplitz_adjustment"] = (P - toe.op.dense()).norm() / std::max(1.0, toe.op.dense().norm());
        e.extras["projection_defect"] = (P * P - P).cwiseAbs().maxCoeff();
    }

    // lambda(K) over the plateau family
    double lambda_k = std::numeric_limits<double>::infinity();
    std::vector<Dense> bs;
    for (double w : opt.plateau_widths) {
        const auto b = plateau(K, w);
        bs.push_back(detail::grid_multiplication(F, fs, [&](const Point& x) { return cd(b(x)); }));
        const auto bop = fs.multiplication("b", [&](const Point& x) { return cd(b(x)); }, 2 * fs.lambda());
        const double v = dixmier_estimate(MatrixOperator(bop.op.sparse(), true), t).value;
        e.extras["lambda_K_w" + std::to_string(w)] = v;
        lambda_k = std::min(lambda_k, v);
    }
    e.extras["lambda_K"] = lambda_k;

    std::vector<Dense> as, deltas;
    const Dense absD = t.abs_D().dense();
    for (const auto& a : a_list) {
        as.push_back(detail::grid_multiplication(F, fs, a.value));
        deltas.push_back(absD * as.back() - as.back() * absD);
    }
    const Dense& b0 = bs.front();
    for (double ep : eps) {
        const Dense A = reconstruct(t.eigensystem(), [&](double v) { return detail::clamp01(f.f(ep * std::abs(v))); }).dense();
        const Dense Ap = reconstruct(t.eigensystem(), [&](double v) { return std::abs(v) * ep < f.u_max ? f.fprime(ep * std::abs(v)) : 0.0; }).dense();
        const Dense R = P * A * P;
        double worst = 0.0, rem = 0.0;
        for (std::size_t j = 0; j < as.size(); ++j) {
            const Dense c = R * as[j] - as[j] * R;
            worst = std::max(worst, detail::dense_lp1(c, t.p));
            const Dense lead = 0.5 * ep * (P * Ap * b0 * deltas[j] * P + P * deltas[j] * b0 * Ap * P);
            rem = std::max(rem, detail::dense_lp1(c - lead, t.p));
        }
        Eigen::SelfAdjointEigenSolver<Dense> es(Dense(0.5 * (R + R.adjoint())), Eigen::EigenvaluesOnly);
        long rank = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()[i] > 1e-9) ++rank;
        e.per_epsilon.emplace_back(ep, worst);
        e.ranks.push_back(rank);
        e.remainder.push_back(rem);
    }
    detail::finish(e, opt.base);
    std::vector<double> ex;
    for (const auto& pe : e.per_epsilon) ex.push_back(pe.first);
    e.remainder_order = detail::log_log_slope(ex, e.remainder);
    return e;
}

// ---------------------------------------------------------------------------
// Commutator estimate

struct CommutatorDecayOptions {
    std::vector<double> eps;  // empty: 12 points from the band guard up by a factor 32
    double slack = 0.1;
    /// false drops the band guard and admits eps whose cutoff reaches the truncation edge
    bool respect_band = true;
};

inline CheckReport commutator_decay_check(const Element& a, const TruncatedTriple& t, const Cutoff& f, const CommutatorDecayOptions& opt = {}) {
    CheckReport r;
    r.name = "commutator_decay";
    const double cf = commutator_constant(f);
    r.residuals["C_f"] = cf;
    const double da = op_norm(bracket_D(a.op, t));
    if (da <= 1e-13) {
        r.verdict = Verdict::pass;
        r.notes["vacuous"] = "[D,a] = 0";
        return r;
    }
    double guard = 0.0;
    std::vector<double> grid = opt.eps;
    if (grid.empty()) {
        detail::valid_eps(t, f, {1.0}, guard);
        for (int i = 0; i < 12; ++i) grid.push_back((opt.respect_band ? 1.0 : 0.25) * guard * std::pow(32.0, i / 11.0));
    }
    const auto eps = opt.respect_band ? detail::valid_eps(t, f, grid, guard) : grid;
    if (eps.empty()) throw Error("commutator_decay_check: every eps is below the band guard");
    double worst = 0.0;
    std::vector<double> ratios;
    for (double ep : eps) {
        const auto A = reconstruct(t.eigensystem(), [&](double v) { return detail::clamp01(f.f(ep * std::abs(v))); });
        const auto c = detail::support_compression(commutator(A, a.op).pruned(1e-15));
        const double nc = c.dim() == 0 ? 0.0 : (c.dim() <= kMaxDenseBlock ? op_norm_exact(c) : op_norm(c));
        ratios.push_back(nc / (ep * da));
        worst = std::max(worst, ratios.back());
    }
    r.series["eps"] = eps;
    r.series["ratio"] = ratios;
    r.residual("sup_ratio", worst, (1.0 + opt.slack) * cf);
    r.decide_from_residuals();
    return r;
}

/// Operator with pure point spectrum: a 0/1 pattern on the eigenbasis of D.
inline Element pure_point_projection(const TruncatedTriple& t, std::uint64_t seed = 11) {
    std::mt19937_64 rng(seed);
    const auto& es = t.eigensystem();
    std::vector<double> pattern(es.values.size());
    for (auto& v : pattern) v = static_cast<double>(rng() & 1u);
    std::size_t i = 0;
    Eigensystem marked = es;
    for (auto& v : marked.values) v = static_cast<double>(i++);
    auto op = reconstruct(marked, [&](double idx) { return pattern[static_cast<std::size_t>(std::lround(idx))]; }).pruned(1e-14);
    return Element{"pure_point", MatrixOperator(op.sparse(), true), std::nullopt, nullptr};
}

}  // namespace sgeo

#endif  // SGEO_VOICULESCU_HPP
