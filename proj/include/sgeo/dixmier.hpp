#ifndef SGEO_DIXMIER_HPP
#define SGEO_DIXMIER_HPP

// Logarithmic Cesaro means, Dixmier-trace estimators, heat functionals and
// the absolute-continuity fit of the hermitian structure.

#include "sgeo/spectral.hpp"

namespace sgeo {

// ---------------------------------------------------------------------------
// Cutoff functions

struct Cutoff {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> fprime;
    double u_max = 1.0;

    /// rho = p * int_0^inf u^(p-1) f(u) du
    double rho(int p) const {
        const auto [x, w] = gauss_legendre(200, 0.0, u_max);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p - 1) * f(x[i]);
        return p * s;
    }
};

/// f(u) = (1 - u)_+
inline Cutoff triangle_cutoff() {
    return {"triangle", [](double u) { return u < 1.0 ? 1.0 - std::max(u, 0.0) : 0.0; },
            [](double u) { return (u >= 0.0 && u < 1.0) ? -1.0 : 0.0; }, 1.0};
}

/// f(u) = exp(1 - 1/(1 - u^2)) on [0, 1), smooth with f(0) = 1.
inline Cutoff bump_cutoff() {
    auto f = [](double u) {
        u = std::abs(u);
        return u < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
    };
    auto fp = [f](double u) {
        if (std::abs(u) >= 1.0) return 0.0;
        const double q = 1.0 - u * u;
        return f(u) * (-2.0 * u / (q * q));
    };
    return {"bump", f, fp, 1.0};
}

/// C_f = (2 pi)^-1 int |s g^(s)| ds for the even extension g(x) = f(|x|);
/// evaluated as (1/pi) int_0^S |2 int_0^1 f'(x) sin(sx) dx| ds.
inline double commutator_constant(const Cutoff& c, double s_max = 500.0, double ds = 0.05) {
    const auto [x, w] = gauss_legendre(800, 0.0, c.u_max);
    std::vector<double> fp(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) fp[i] = c.fprime(x[i]);
    double acc = 0.0, prev = 0.0;
    const int steps = static_cast<int>(s_max / ds);
    for (int k = 0; k <= steps; ++k) {
        const double s = k * ds;
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * fp[i] * std::sin(s * x[i]);
        v = std::abs(2.0 * v);
        if (k > 0) acc += 0.5 * (v + prev) * ds;
        prev = v;
    }
    return acc / kPi;
}

// ---------------------------------------------------------------------------
// Cesaro means

/// M(f)(lambda) = (1/log(lambda/lambda_0)) int_{lambda_0}^lambda f(u) du/u by the
/// trapezoid rule in log u, iterated k times. log_lambda must be increasing.
inline std::vector<double> cesaro_mean(const std::vector<double>& log_lambda, std::vector<double> f, int iterations = 1) {
    if (log_lambda.size() < 8) throw Error("cesaro_mean: need at least 8 grid points");
    if (f.size() != log_lambda.size()) throw Error("cesaro_mean: size mismatch");
    const double t0 = log_lambda.front();
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> m(f.size());
        double integral = 0.0;
        m[0] = f[0];
        for (std::size_t i = 1; i < f.size(); ++i) {
            integral += 0.5 * (f[i] + f[i - 1]) * (log_lambda[i] - log_lambda[i - 1]);
            m[i] = integral / (log_lambda[i] - t0);
        }
        f = std::move(m);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Dixmier trace estimators

struct DixmierOptions {
    /// Cesaro iterations applied to the local slope series
    int cesaro = 1;
    /// window [N_max / window_span, N_max]
    double window_span = 16.0;
    int points_per_doubling = 8;
    double drift_tol = 0.01;
    /// estimator (i) is skipped above this dimension for non-diagonal T
    Eigen::Index max_dense = kMaxDenseBlock;
};

namespace detail {

/// Diagonal <v_n, T v_n> in the eigenbasis of D, reordered by ascending |D|.
inline std::vector<double> spectral_diagonal(const MatrixOperator& x, const TruncatedTriple& t, const std::vector<Eigen::Index>& order, bool real_part = true) {
    const Sparse& v = t.eigensystem().basis.sparse();
    const Sparse tv = x.sparse() * v;
    const Sparse prod = v.conjugate().cwiseProduct(tv);
    Vector diag = Vector::Zero(v.cols());
    for (Eigen::Index c = 0; c < prod.outerSize(); ++c)
        for (Sparse::InnerIterator it(prod, c); it; ++it) diag[c] += it.value();
    std::vector<double> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const cd d = diag[order[i]];
        out[i] = real_part ? d.real() : d.imag();
    }
    return out;
}

/// Number of |D| eigenvalues inside the complete part of the spectrum.
inline std::size_t complete_count(const TruncatedTriple& t, const std::vector<double>& spec) {
    const double edge = t.complete_spectrum_bound();
    if (!std::isfinite(edge)) return spec.size();
    return static_cast<std::size_t>(std::upper_bound(spec.begin(), spec.end(), edge * (1.0 + 1e-12)) - spec.begin());
}

/// Slope of partial sums S_N against log N over [N_max/span, N_max].
inline AsymptoticEstimate log_slope(const std::vector<double>& partial, std::size_t n_max, const DixmierOptions& opt) {
    AsymptoticEstimate e;
    const double lo = std::max(2.0, static_cast<double>(n_max) / opt.window_span);
    std::vector<std::size_t> grid;
    for (int j = 0;; ++j) {
        const auto n = static_cast<std::size_t>(std::llround(lo * std::pow(2.0, static_cast<double>(j) / opt.points_per_doubling)));
        if (n > n_max) break;
        if (grid.empty() || n != grid.back()) grid.push_back(n);
    }
    const int span = opt.points_per_doubling;
    if (grid.size() < static_cast<std::size_t>(span) + 8) {
        e.value = std::numeric_limits<double>::quiet_NaN();
        e.diagnostic = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    std::vector<double> t, s;
    for (std::size_t j = 0; j + static_cast<std::size_t>(span) < grid.size(); ++j) {
        const auto a = grid[j], b = grid[j + static_cast<std::size_t>(span)];
        t.push_back(std::log(static_cast<double>(a)));
        s.push_back((partial[b - 1] - partial[a - 1]) / std::log(static_cast<double>(b) / static_cast<double>(a)));
    }
    const auto m = opt.cesaro > 0 ? cesaro_mean(t, s, opt.cesaro) : s;
    e.window_values = m;
    e.value = m.back();
    // drift of the raw local slope per doubling, relative to the reading
    std::vector<double> l2;
    for (double v : t) l2.push_back(v / std::log(2.0));
    const auto fit = least_squares(l2, s);
    e.trend_slope = e.value != 0.0 ? fit.slope / std::abs(e.value) : fit.slope;
    double var = 0.0;
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    for (double v : s) var += (v - mean) * (v - mean);
    const double doublings = std::max(1.0, std::log2(static_cast<double>(n_max) / lo));
    e.stderr_ = std::sqrt(var / static_cast<double>(s.size())) / std::sqrt(doublings);
    e.converged = std::abs(e.trend_slope) <= opt.drift_tol;
    e.extras["n_lo"] = static_cast<double>(grid.front());
    e.extras["n_max"] = static_cast<double>(n_max);
    return e;
}

}  // namespace detail

/// Estimator (ii) only: slope of Tr(E_N |D|^-p T) against log N. Linear in T, any T.
inline AsymptoticEstimate dixmier_linear(const MatrixOperator& x, const TruncatedTriple& t, const DixmierOptions& opt = {}, bool real_part = true) {
    const auto [spec, order] = t.abs_spectrum();
    const auto diag = detail::spectral_diagonal(x, t, order, real_part);
    std::vector<double> partial(spec.size());
    double s = 0.0;
    for (std::size_t n = 0; n < spec.size(); ++n) partial[n] = (s += std::pow(spec[n], -t.p) * diag[n]);
    return detail::log_slope(partial, detail::complete_count(t, spec), opt);
}

/// Complex-valued version of the linear estimator (real and imaginary parts separately).
inline cd dixmier_linear_complex(const MatrixOperator& x, const TruncatedTriple& t, const DixmierOptions& opt = {}) {
    return {dixmier_linear(x, t, opt, true).value, dixmier_linear(x, t, opt, false).value};
}

/// Both estimators for positive T; value is estimator (ii), diagnostic the relative gap to (i).
inline AsymptoticEstimate dixmier_estimate(const MatrixOperator& x, const TruncatedTriple& t, const DixmierOptions& opt = {}) {
    if (x.dim() != t.hilbert_dim()) throw Error("dixmier_estimate: dimension mismatch");
    const double scale = x.max_abs();
    if (scale == 0.0) {
        AsymptoticEstimate z;
        z.converged = true;
        return z;
    }
    if (!x.is_hermitian(1e-10 * scale)) throw Error("dixmier_estimate: T must be positive (not Hermitian)");
    const auto tes = eigendecompose(x.as_hermitian(1e-10 * scale));
    if (tes.values.front() < -1e-10 * scale)
        throw Error("dixmier_estimate: T must be positive (min eigenvalue " + std::to_string(tes.values.front()) + ")");
    auto e = dixmier_linear(x, t, opt);

    // estimator (i): sigma_N(T^(1/2) |D|^-p T^(1/2))
    const auto [spec, order] = t.abs_spectrum();
    const int p = t.p;
    const double shift = t.kernel_shift;
    const double zero_tol = 1e-9 * std::max(1.0, t.D.max_abs());
    const auto inv = reconstruct(t.eigensystem(), [p, shift, zero_tol](double v) {
        const double a = std::abs(v) <= zero_tol ? shift : std::abs(v);
        return std::pow(a, -p);
    });
    const auto root = reconstruct(tes, [](double v) { return std::sqrt(std::max(v, 0.0)); }).pruned(1e-15 * scale);
    const MatrixOperator y((root * inv * root).sparse(), true);
    double est_i = std::numeric_limits<double>::quiet_NaN();
    bool dense_ok = true;
    for (const auto& comp : detail::components(y.sparse()))
        if (static_cast<Eigen::Index>(comp.size()) > std::min(opt.max_dense, kMaxDenseBlock)) dense_ok = false;
    if (dense_ok) {
        auto mu = singular_values(y.as_hermitian(1e-9));
        std::vector<double> partial(mu.size());
        double s = 0.0;
        for (std::size_t n = 0; n < mu.size(); ++n) partial[n] = (s += mu[n]);
        est_i = detail::log_slope(partial, detail::complete_count(t, spec), opt).value;
    }
    e.extras["estimator_i"] = est_i;
    e.diagnostic = std::isfinite(est_i) ? std::abs(est_i - e.value) / std::max(std::abs(e.value), 1e-300) : est_i;
    return e;
}

// ---------------------------------------------------------------------------
// Heat functional

struct HeatOptions {
    std::vector<double> eps;  // empty: a default grid near the band guard
    double drift_tol = 0.01;
};

/// eps^p Tr(f(eps|D|) T) on a grid of eps, read at the smallest valid eps.
inline AsymptoticEstimate heat_functional(const MatrixOperator& x, const Cutoff& f, const TruncatedTriple& t, HeatOptions opt = {}) {
    const auto [spec, order] = t.abs_spectrum();
    const double edge = t.complete_spectrum_bound();
    const double eps_min = std::isfinite(edge) ? f.u_max / edge : 0.0;
    if (opt.eps.empty()) {
        const double e0 = std::max(1.25 * eps_min, 1e-3);
        for (int i = 0; i < 16; ++i) opt.eps.push_back(e0 * std::pow(8.0, i / 15.0));
    }
    std::sort(opt.eps.begin(), opt.eps.end());
    const auto diag = detail::spectral_diagonal(x, t, order);
    AsymptoticEstimate e;
    std::vector<double> valid_eps;
    for (double eps : opt.eps) {
        if (eps < eps_min) continue;  // f(eps|D|) would reach past the complete spectrum
        double s = 0.0;
        for (std::size_t n = 0; n < spec.size(); ++n) {
            const double v = f.f(eps * spec[n]);
            if (v != 0.0) s += v * diag[n];
        }
        valid_eps.push_back(eps);
        e.window_values.push_back(std::pow(eps, t.p) * s);
    }
    e.extras["invalid_points"] = static_cast<double>(opt.eps.size() - valid_eps.size());
    if (valid_eps.empty()) throw Error("heat_functional: every eps is below the band guard");
    e.value = e.window_values.front();
    // change of the reading per halving of eps
    std::vector<double> l2;
    for (double v : valid_eps) l2.push_back(-std::log2(v));
    const auto fit = detail::least_squares(l2, e.window_values);
    e.trend_slope = e.value != 0.0 ? fit.slope / std::abs(e.value) : fit.slope;
    e.converged = std::abs(e.trend_slope) <= opt.drift_tol;
    e.extras["liminf"] = *std::min_element(e.window_values.begin(), e.window_values.end());
    e.extras["eps_min_valid"] = valid_eps.front();
    return e;
}

struct HeatDixmierOptions {
    double gap_tol = 0.07;
    double liminf_slack = -0.02;
    /// absolute tolerance used when both sides are this small
    double zero_tol = 0.02;
    DixmierOptions dixmier;
    HeatOptions heat;
};

/// liminf lambda^-p alpha(lambda) over the upper part of the complete spectrum.
inline double counting_lower_constant(const TruncatedTriple& t) {
    const auto [spec, order] = t.abs_spectrum();
    double edge = t.complete_spectrum_bound();
    if (!std::isfinite(edge)) edge = spec.back();
    std::vector<double> ls;
    for (int i = 0; i <= 32; ++i) ls.push_back(edge * std::pow(16.0, -1.0 + i / 32.0));
    const auto a = counting_function(t, ls);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ls.size(); ++i) m = std::min(m, static_cast<double>(a[i]) / std::pow(ls[i], t.p));
    return m;
}

inline CheckReport heat_vs_dixmier(const MatrixOperator& x, const Cutoff& f, const TruncatedTriple& t, const HeatDixmierOptions& opt = {}) {
    CheckReport r;
    r.name = "heat_vs_dixmier";
    const double c1 = counting_lower_constant(t);
    r.residuals["counting_lower_constant"] = c1;
    if (!(c1 > 0.0)) {
        r.diagnostics.push_back("liminf lambda^-p alpha(lambda) is not positive");
        return r;
    }
    const auto heat = heat_functional(x, f, t, opt.heat);
    const auto dix = dixmier_linear(x, t, opt.dixmier);
    const double rho = f.rho(t.p);
    const double rhs = rho * dix.value;
    r.residuals["heat"] = heat.value;
    r.residuals["dixmier"] = dix.value;
    r.residuals["rho"] = rho;
    r.series["heat_window"] = heat.window_values;
    r.series["dixmier_window"] = dix.window_values;
    if (std::abs(rhs) < opt.zero_tol && std::abs(heat.value) < opt.zero_tol) {
        r.residual("absolute_gap", std::abs(heat.value - rhs), opt.zero_tol);
        r.notes["mode"] = "both sides near zero";
    } else {
        const double gap = std::abs(heat.value - rhs) / std::abs(rhs);
        r.residual("relative_gap", gap, opt.gap_tol);
        // liminf_eps heat <= rho * dixmier, with slack
        const double slack = (rhs - heat.extras.at("liminf")) / std::abs(rhs);
        r.residual("liminf_violation", -slack, -opt.liminf_slack);
    }
    r.decide_from_residuals();
    return r;
}

// ---------------------------------------------------------------------------
// Absolute continuity

struct ContinuitySample {
    Vector xi, eta;
    std::string a;  // generator name
};

/// Fits one scalar kappa with <xi, a eta> = kappa * Dixmier(a (xi|eta) |D|^-p).
inline CheckReport absolute_continuity_fit(const TruncatedTriple& t, const std::vector<ContinuitySample>& samples,
                                           double spread_tol = 0.05, const DixmierOptions& opt = {}) {
    if (samples.size() < 4) throw Error("absolute_continuity_fit: need at least 4 samples");
    CheckReport r;
    r.name = "absolute_continuity";
    std::vector<cd> lhs, rhs;
    std::size_t skipped = 0;
    for (const auto& s : samples) {
        if (s.xi.norm() == 0.0 || s.eta.norm() == 0.0) {
            ++skipped;
            continue;
        }
        const auto& a = t.generator(s.a);
        const cd l = s.xi.dot(a.op.apply(s.eta));
        const Element inner = module_inner(s.xi, s.eta, t);
        MatrixOperator b;
        if (a.symbol && inner.symbol) b = t.require_fourier("absolute_continuity_fit").realize(*a.symbol * *inner.symbol);
        else b = a.op * inner.op;
        // real and imaginary parts of the linear functional separately
        lhs.push_back(l);
        rhs.push_back(dixmier_linear_complex(b, t, opt));
    }
    if (lhs.size() < 4) throw Error("absolute_continuity_fit: fewer than 4 nonzero samples");
    cd num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        num += std::conj(rhs[i]) * lhs[i];
        den += std::norm(rhs[i]);
    }
    const cd kappa = num / den;
    double scale = 0.0, worst = 0.0;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        scale = std::max(scale, std::abs(lhs[i]));
        worst = std::max(worst, std::abs(lhs[i] - kappa * rhs[i]));
        ratios.push_back(std::abs(rhs[i]) > 0.0 ? std::abs(lhs[i] / rhs[i]) : 0.0);
    }
    r.residuals["kappa"] = kappa.real();
    r.residuals["kappa_imag"] = kappa.imag();
    r.residuals["samples"] = static_cast<double>(lhs.size());
    r.residuals["skipped"] = static_cast<double>(skipped);
    r.series["ratios"] = ratios;
    r.residual("relative_spread", worst / scale, spread_tol);
    r.decide_from_residuals();
    return r;
}

}  // namespace sgeo

#endif  // SGEO_DIXMIER_HPP
