#ifndef SGEO_METRIC_HPP
#define SGEO_METRIC_HPP

// Spectral distance d(x,y) = sup{ h(x) - h(y) : ||[D,h]|| <= 1 } over real
// band-limited h, and the finite propagation speed of exp(itD).

#include "sgeo/calculus.hpp"

#include <random>

namespace sgeo {

struct DistanceResult {
    double lower_bound = 0.0;   // witness(x) - witness(y)
    TrigPoly witness;           // real, band-limited, ||[D,witness]|| <= 1
    double constraint_slack = 0.0;  // 1 - ||[D,witness]||
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // best lower bound per iteration
    std::string start;            // warm start that seeded the ascent
};

struct DistanceOptions {
    int budget = 200;
    int bandwidth = 0;        // 0: lambda / (2p)
    double step = 0.01;       // relative step, scaled by 1/sqrt(iteration) and adapted
    double tol = 1e-4;        // relative improvement over `window` iterations
    int window = 40;
    Eigen::Index dense_limit = 600;  // exact top eigenpair per iterate up to this dimension
};

namespace detail {

/// Real band-limited functions h = sum_{k>0} c_k e_k + conj(c_k) e_-k, parametrized by (Re c_k, Im c_k).
struct RealBasis {
    std::vector<Mode> half;  // k > 0 lexicographically, |k|_inf <= b
    int p = 1;
    double period = 1.0;

    RealBasis(int p_, int b, double L) : p(p_), period(L) {
        const int side = 2 * b + 1;
        BoxArray shape(p_, side);
        shape.data.clear();
        for (std::size_t f = 0; f < BoxArray::ipow(side, p_); ++f) {
            const auto idx = shape.unflat(f);
            Mode k{0, 0, 0};
            for (int a = 0; a < p_; ++a) k[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)] - b;
            if (k > Mode{0, 0, 0}) half.push_back(k);
        }
    }
    std::size_t size() const { return 2 * half.size(); }

    TrigPoly function(const RealVector& c) const {
        TrigPoly h(p, period);
        for (std::size_t i = 0; i < half.size(); ++i) {
            const cd ck(c[static_cast<Eigen::Index>(2 * i)], c[static_cast<Eigen::Index>(2 * i + 1)]);
            if (ck == cd(0.0)) continue;
            h.set(half[i], ck);
            h.set(-half[i], std::conj(ck));
        }
        return h;
    }

    RealVector params(const TrigPoly& h) const {
        RealVector c(static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < half.size(); ++i) {
            const cd v = h.coeff(half[i]);
            c[static_cast<Eigen::Index>(2 * i)] = v.real();
            c[static_cast<Eigen::Index>(2 * i + 1)] = v.imag();
        }
        return c;
    }

    cd exp_at(const Mode& k, const Point& x) const {
        const double w = 2.0 * kPi / period;
        return std::exp(I * w * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
    }

    /// gradient of h(x) - h(y)
    RealVector objective_gradient(const Point& x, const Point& y) const {
        RealVector g(static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < half.size(); ++i) {
            const cd d = exp_at(half[i], x) - exp_at(half[i], y);
            g[static_cast<Eigen::Index>(2 * i)] = 2.0 * d.real();
            g[static_cast<Eigen::Index>(2 * i + 1)] = -2.0 * d.imag();
        }
        return g;
    }
};

struct TopPair {
    double sigma = 0.0;
    double sign = 1.0;
    Vector v;
};

/// Largest |eigenvalue| of the Hermitian H = i[D,h] with an eigenvector of that eigenvalue.
inline TopPair top_pair(const MatrixOperator& H, Eigen::Index dense_limit, const Vector* warm) {
    TopPair out;
    const auto n = H.dim();
    if (n <= dense_limit) {
        Dense d = H.dense();
        d = 0.5 * (d + d.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Dense> es(d);
        const double lo = es.eigenvalues()[0], hi = es.eigenvalues()[n - 1];
        const bool top = std::abs(hi) >= std::abs(lo);
        out.sigma = top ? std::abs(hi) : std::abs(lo);
        out.sign = top ? 1.0 : -1.0;
        out.v = es.eigenvectors().col(top ? n - 1 : 0);
        return out;
    }
    Vector v;
    if (warm && warm->size() == n) {
        v = *warm;
    } else {
        std::mt19937_64 rng(0xd157);
        std::normal_distribution<double> nd;
        v.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = cd(nd(rng), nd(rng));
    }
    v.normalize();
    const Sparse& m = H.sparse();
    double lam2 = 0.0, prev = 0.0;
    for (int it = 0; it < 400; ++it) {
        Vector w = m * (m * v);
        lam2 = w.norm();
        if (lam2 == 0.0) return out;
        v = w / lam2;
        if (it > 10 && std::abs(lam2 - prev) <= 1e-12 * lam2) break;
        prev = lam2;
    }
    const double lam = std::sqrt(lam2);
    // split the +lam / -lam mixture
    const Vector hv = m * v;
    Vector plus = lam * v + hv, minus = lam * v - hv;
    if (plus.norm() >= minus.norm()) {
        out.v = plus.normalized();
        out.sign = 1.0;
    } else {
        out.v = minus.normalized();
        out.sign = -1.0;
    }
    out.sigma = std::abs(out.v.dot(m * out.v).real());
    return out;
}

/// corr(a, b, k) = sum_m <a(m+k), b(m)> over modes and spinor components
inline cd shifted_inner(const FourierSpace& fs, const Vector& a, const Vector& b, const Mode& k) {
    const int N = fs.spinor_dim();
    const auto& modes = fs.mode_labels();
    cd s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto r = fs.mode_index(modes[m] + k);
        if (r < 0) continue;
        for (int q = 0; q < N; ++q) s += std::conj(a[r * N + q]) * b[static_cast<Eigen::Index>(m) * N + q];
    }
    return s;
}

/// Jackson kernel weights of degree b: Fourier coefficients of (sin(m t/2)/sin(t/2))^4, m = b/2 + 1, normalized.
inline std::vector<double> jackson_weights(int b) {
    const int m = b / 2 + 1;
    const int n = 8 * (b + 2);
    std::vector<double> w(static_cast<std::size_t>(b + 1), 0.0);
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * (j + 0.5) / n;
        const double k = std::pow(std::sin(m * t / 2.0) / std::sin(t / 2.0), 4);
        for (int q = 0; q <= b; ++q) w[static_cast<std::size_t>(q)] += k * std::cos(q * t);
    }
    const double w0 = w[0];
    for (auto& v : w) v /= w0;
    for (int q = 2 * (m - 1) + 1; q <= b; ++q) w[static_cast<std::size_t>(q)] = 0.0;
    return w;
}

}  // namespace detail

/// ||[D,h]|| for a real symbol h, exact below the dense block limit.
inline double lipschitz_norm(const TrigPoly& h, const TruncatedTriple& t) {
    const auto& fs = t.require_fourier("lipschitz_norm");
    const MatrixOperator H = I * bracket_D(fs.realize(h), t);
    if (H.dim() <= kMaxDenseBlock) {
        Dense d = H.dense();
        d = 0.5 * (d + d.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Dense> es(d, Eigen::EigenvaluesOnly);
        return std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[H.dim() - 1]));
    }
    return op_norm(H);
}

/// Certified lower bound on the spectral distance. Maximizes the scale-invariant
/// ratio (h(x) - h(y)) / ||[D,h]|| by normalized subgradient ascent, then
/// rescales the best iterate so that the constraint holds at the exact norm.
inline DistanceResult connes_distance(const Point& x, const Point& y, const TruncatedTriple& t, const DistanceOptions& opt = {}) {
    const auto& fs = t.require_fourier("connes_distance");
    DistanceResult res;
    res.witness = TrigPoly(fs.p(), fs.period());
    if (fs.distance(x, y) == 0.0) {
        res.converged = true;
        res.constraint_slack = 1.0;
        res.start = "zero";
        return res;
    }
    // canonical order so that d(x,y) and d(y,x) share one computation
    if (y < x) {
        auto r = connes_distance(y, x, t, opt);
        r.witness = cd(-1.0) * r.witness;
        return r;
    }
    const int b = opt.bandwidth > 0 ? opt.bandwidth : std::max(1, fs.lambda() / (2 * fs.p()));
    if (b > fs.lambda()) throw Error("connes_distance: witness bandwidth exceeds lambda");
    const detail::RealBasis basis(fs.p(), b, fs.period());
    const RealVector gl = basis.objective_gradient(x, y);

    auto lin = [&](const RealVector& c) { return gl.dot(c); };

    // warm starts: Jackson-smoothed distance function and the sine coordinate along x - y
    std::vector<std::pair<std::string, RealVector>> starts;
    {
        const FunctionSpace& sp = fs;
        TrigPoly d = project_function([&](const Point& z) { return cd(sp.distance(z, y)); }, fs.p(), fs.period(), b, 16 * b + 16);
        const auto jw = detail::jackson_weights(b);
        TrigPoly smooth(fs.p(), fs.period());
        for (const auto& [k, v] : d.coeffs()) {
            double w = 1.0;
            for (int a = 0; a < fs.p(); ++a) w *= jw[static_cast<std::size_t>(std::abs(k[static_cast<std::size_t>(a)]))];
            if (w != 0.0) smooth.set(k, v * w);
        }
        starts.emplace_back("jackson", basis.params(smooth));
    }
    {
        const double L = fs.period();
        Point u{0, 0, 0}, mid{0, 0, 0};
        double len = 0.0;
        for (int a = 0; a < fs.p(); ++a) {
            double d = x[static_cast<std::size_t>(a)] - y[static_cast<std::size_t>(a)];
            d -= L * std::round(d / L);
            u[static_cast<std::size_t>(a)] = d;
            mid[static_cast<std::size_t>(a)] = y[static_cast<std::size_t>(a)] + 0.5 * d;
            len += d * d;
        }
        len = std::sqrt(len);
        const double w = 2.0 * kPi / L;
        TrigPoly s(fs.p(), L);
        for (int a = 0; a < fs.p(); ++a) {
            Mode k{0, 0, 0};
            k[static_cast<std::size_t>(a)] = 1;
            // (u_a / len) sin(w (z_a - mid_a)) / w
            const cd c = (u[static_cast<std::size_t>(a)] / len) / w * std::exp(-I * w * mid[static_cast<std::size_t>(a)]) / (2.0 * I);
            s.set(k, c);
            s.set(-k, std::conj(c));
        }
        starts.emplace_back("sine", basis.params(s));
    }

    // Ascent on L / sigma_T with sigma_T = T log sum_i exp(|lambda_i| / T) >= ||[D,h]||,
    // a smoothed norm whose temperature T = tau * sigma is annealed towards 0.
    // Above the dense limit only the top pair is used (plain subgradient).
    struct Eval {
        std::vector<double> lam;
        Dense vecs;
        double sigma = 0.0;
    };
    auto evaluate = [&](const RealVector& c, const Vector* warm) {
        Eval e;
        const MatrixOperator H = I * bracket_D(fs.realize(basis.function(c)), t);
        if (H.dim() <= opt.dense_limit) {
            Dense d = H.dense();
            d = 0.5 * (d + d.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<Dense> es(d);
            e.lam.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
            e.vecs = es.eigenvectors();
            for (double l : e.lam) e.sigma = std::max(e.sigma, std::abs(l));
        } else {
            const auto tp = detail::top_pair(H, opt.dense_limit, warm);
            e.lam = {tp.sign * tp.sigma};
            e.vecs = tp.v;
            e.sigma = tp.sigma;
        }
        return e;
    };
    auto smooth_sigma = [](const Eval& e, double T) {
        if (T <= 0.0) return e.sigma;
        double s = 0.0;
        for (double l : e.lam) s += std::exp((std::abs(l) - e.sigma) / T);
        return e.sigma + T * std::log(s);
    };

    RealVector c;
    double best = -std::numeric_limits<double>::infinity();
    Eval ev;
    for (const auto& [name, c0] : starts) {
        auto q = evaluate(c0, nullptr);
        if (q.sigma <= 0.0) continue;
        const double r = lin(c0) / q.sigma;
        if (r > best) {
            best = r;
            c = c0;
            ev = std::move(q);
            res.start = name;
        }
    }
    if (!std::isfinite(best)) return res;
    RealVector best_c = c;
    double tau = 1e-2, eta = opt.step;
    for (int it = 1; it <= opt.budget; ++it) {
        const double T = ev.lam.size() > 1 ? tau * ev.sigma : 0.0;
        const double sT = smooth_sigma(ev, T);
        RealVector gs = RealVector::Zero(static_cast<Eigen::Index>(basis.size()));
        for (std::size_t i = 0; i < ev.lam.size(); ++i) {
            const double w = T > 0.0 ? std::exp((std::abs(ev.lam[i]) - sT) / T) : 1.0;
            if (w < 1e-10) continue;
            const double sg = ev.lam[i] >= 0.0 ? 1.0 : -1.0;
            const Vector v = ev.vecs.col(static_cast<Eigen::Index>(i));
            const Vector u = t.D.apply(v);
            for (std::size_t q = 0; q < basis.half.size(); ++q) {
                const auto& k = basis.half[q];
                const cd gk = I * (detail::shifted_inner(fs, u, v, k) - detail::shifted_inner(fs, v, u, k));
                const cd gm = I * (detail::shifted_inner(fs, u, v, -k) - detail::shifted_inner(fs, v, u, -k));
                gs[static_cast<Eigen::Index>(2 * q)] += w * sg * (gk + gm).real();
                gs[static_cast<Eigen::Index>(2 * q + 1)] += w * sg * (I * (gk - gm)).real();
            }
        }
        const double Lc = lin(c);
        const RealVector g = (gl * sT - Lc * gs) / (sT * sT);
        const double gn = g.norm();
        if (gn == 0.0) {
            res.converged = true;
            break;
        }
        const RealVector trial = c + (eta / std::sqrt(static_cast<double>(it))) * c.norm() * (g / gn);
        Vector warm = ev.vecs.col(ev.vecs.cols() - 1);
        auto te = evaluate(trial, &warm);
        if (te.sigma > 0.0 && lin(trial) / smooth_sigma(te, T) > Lc / sT) {
            c = trial;
            ev = std::move(te);
            eta = std::min(1.5 * eta, 1.0);
            const double r = lin(c) / ev.sigma;
            if (r > best) {
                best = r;
                best_c = c;
            }
        } else {
            eta *= 0.5;
        }
        tau = std::max(1e-4, 0.97 * tau);
        res.history.push_back(best);
        res.iterations = it;
        if (it > opt.window) {
            const double old = res.history[res.history.size() - 1 - static_cast<std::size_t>(opt.window)];
            if (best - old <= opt.tol * std::abs(best)) {
                res.converged = true;
                break;
            }
        }
    }
    // certification at the exact norm
    TrigPoly h = basis.function(best_c);
    const double sigma = lipschitz_norm(h, t);
    if (sigma <= 0.0) return res;
    // the relative margin absorbs rounding in the rescaled norm
    const double scale = 1.0 / (sigma * (1.0 + 1e-12));
    h = cd(scale) * h;
    res.witness = h;
    res.constraint_slack = 1.0 - sigma * scale;
    res.lower_bound = (h(x) - h(y)).real();
    return res;
}

/// Distances between all pairs; every certified witness is evaluated on every pair.
struct DistanceTable {
    std::vector<Point> points;
    std::vector<std::vector<double>> lower_bound;
    std::vector<DistanceResult> pair_results;  // i < j in row-major order
};

inline DistanceTable connes_distance_batch(const std::vector<Point>& points, const TruncatedTriple& t, const DistanceOptions& opt = {}) {
    DistanceTable tab;
    tab.points = points;
    const auto n = points.size();
    tab.lower_bound.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) tab.pair_results.push_back(connes_distance(points[i], points[j], t, opt));
    for (const auto& r : tab.pair_results)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                tab.lower_bound[i][j] = std::max(tab.lower_bound[i][j], std::abs((r.witness(points[i]) - r.witness(points[j])).real()));
    return tab;
}

/// The same geometry with D replaced by c D.
inline TruncatedTriple scaled_dirac(const TruncatedTriple& t, double c) {
    if (!(c > 0.0)) throw Error("scaled_dirac: c must be positive");
    TruncatedTriple s = t;
    s.D = MatrixOperator((c * t.D).sparse(), true);
    for (auto& g : s.clifford) g *= c;
    s.set_complete_spectrum_bound(c * t.complete_spectrum_bound());
    s.kernel_shift = c * t.kernel_shift;
    s.refine = nullptr;
    s.finalize();
    return s;
}

// ---------------------------------------------------------------------------
// Finite propagation

struct PropagationOptions {
    double margin = -1.0;   // smearing margin; negative: 2 pi / sqrt(lambda)
    double leak_tol = 0.01;
    Point source{0.0, 0.0, 0.0};
    bool refine = true;     // compare with the triple at 2 lambda
};

struct PropagationProfile {
    std::vector<double> times, leakage, radius99;
    double margin = 0.0;
};

/// Leaked mass of exp(itD) applied to band-limited deltas at the source.
inline PropagationProfile propagation_profile(const TruncatedTriple& t, const std::vector<double>& times, double margin) {
    const auto& fs = t.require_fourier("finite_propagation");
    const int N = fs.spinor_dim();
    const auto& es = t.eigensystem();
    const auto& modes = fs.mode_labels();
    const double w = 2.0 * kPi / fs.period();
    const int n = 8 * fs.lambda();
    SamplingGrid g{fs.p(), n, fs.period()};
    PropagationProfile prof;
    prof.margin = margin;
    const Point y{0.0, 0.0, 0.0};
    std::vector<double> dist(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dist[i] = fs.distance(g.point(i), y);
    const Sparse& V = es.basis.sparse();
    const Sparse Vt = V.adjoint();
    for (double tm : times) {
        double leak = 0.0, r99 = 0.0;
        for (int s = 0; s < N; ++s) {
            Vector psi = Vector::Zero(t.hilbert_dim());
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const auto& k = modes[m];
                psi[static_cast<Eigen::Index>(m) * N + s] = std::exp(-I * w * (k[0] * y[0] + k[1] * y[1] + k[2] * y[2]));
            }
            Vector c = Vt * psi;
            for (std::size_t i = 0; i < es.values.size(); ++i) c[static_cast<Eigen::Index>(i)] *= std::exp(I * tm * es.values[i]);
            psi = V * c;
            std::vector<double> mass(g.size(), 0.0);
            for (int q = 0; q < N; ++q) {
                const auto vals = g.synthesize(fs.component(psi, q));
                for (std::size_t i = 0; i < mass.size(); ++i) mass[i] += std::norm(vals.data[i]);
            }
            const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
            double out = 0.0;
            for (std::size_t i = 0; i < mass.size(); ++i)
                if (dist[i] > std::abs(tm) + margin) out += mass[i];
            leak = std::max(leak, out / total);
            // smallest radius holding 99% of the mass
            std::vector<std::size_t> order(mass.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
            double acc = 0.0;
            for (auto i : order) {
                acc += mass[i];
                if (acc >= 0.99 * total) {
                    r99 = std::max(r99, dist[i]);
                    break;
                }
            }
        }
        prof.times.push_back(tm);
        prof.leakage.push_back(leak);
        prof.radius99.push_back(r99);
    }
    return prof;
}

/// Kernel of exp(itD) concentrated in d(x,y) <= |t| + margin; leakage must shrink under refinement.
inline CheckReport finite_propagation_check(const TruncatedTriple& t, const std::vector<double>& times, const PropagationOptions& opt = {}) {
    CheckReport r;
    r.name = "finite_propagation";
    if (times.empty()) throw Error("finite_propagation_check: empty time grid");
    const auto& fs = t.require_fourier("finite_propagation_check");
    auto margin_at = [&](int lam) { return opt.margin >= 0.0 ? opt.margin : 2.0 * kPi / std::sqrt(static_cast<double>(lam)); };
    const auto prof = propagation_profile(t, times, margin_at(fs.lambda()));
    r.series["times"] = prof.times;
    r.series["leakage"] = prof.leakage;
    r.series["radius99"] = prof.radius99;
    r.residuals["margin"] = prof.margin;
    r.residual("max_leakage", *std::max_element(prof.leakage.begin(), prof.leakage.end()), opt.leak_tol);
    r.decide_from_residuals();
    if (opt.refine) {
        if (!t.refine) {
            r.verdict = Verdict::inconclusive;
            r.diagnostics.push_back("no refinement available");
            return r;
        }
        const auto fine = t.refine(2 * fs.lambda());
        const auto pf = propagation_profile(fine, times, margin_at(2 * fs.lambda()));
        r.series["leakage_refined"] = pf.leakage;
        bool shrinks = true;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (!(pf.leakage[i] < prof.leakage[i]) && prof.leakage[i] > 0.0) shrinks = false;
        if (!shrinks) {
            r.verdict = Verdict::fail;
            r.diagnostics.push_back("leakage does not decrease under doubling of lambda");
        }
    }
    return r;
}

}  // namespace sgeo

#endif  // SGEO_METRIC_HPP
