#ifndef SGEO_SPECTRAL_HPP
#define SGEO_SPECTRAL_HPP

// Characteristic values, Weyl norms, (p,1) norms, the counting function of
// |D| and the dimension fit.

#include "sgeo/calculus.hpp"

namespace sgeo {

struct SingularValueProfile {
    std::vector<double> mu;     // descending
    std::vector<double> sigma;  // sigma[N-1] = mu_1 + ... + mu_N
    Eigen::Index source_dim = 0;

    double sigma_at(std::size_t n) const {
        if (n == 0) return 0.0;
        return sigma[std::min(n, sigma.size()) - 1];
    }
    double trace_norm() const { return sigma.empty() ? 0.0 : sigma.back(); }
};

inline SingularValueProfile singular_profile(const MatrixOperator& x) {
    SingularValueProfile p;
    p.mu = singular_values(x);
    p.source_dim = x.dim();
    double s = 0.0;
    for (double m : p.mu) p.sigma.push_back(s += m);
    return p;
}

struct Lp1Norm {
    double primary = 0.0;    // sum n^(-1+1/p) mu_n
    double alternate = 0.0;  // (1 - 1/p) sum N^(1/p-2) sigma_N
};

inline Lp1Norm lp1_norm(const SingularValueProfile& prof, double p) {
    if (p < 1.0) throw Error("lp1_norm: p must be at least 1");
    const double th = 1.0 / p;
    Lp1Norm r;
    for (std::size_t n = 1; n <= prof.mu.size(); ++n) {
        const double dn = static_cast<double>(n);
        r.primary += std::pow(dn, th - 1.0) * prof.mu[n - 1];
        r.alternate += std::pow(dn, th - 2.0) * prof.sigma[n - 1];
    }
    r.alternate *= (1.0 - th);
    return r;
}

inline Lp1Norm lp1_norm(const MatrixOperator& x, double p) { return lp1_norm(singular_profile(x), p); }

/// Constant of the interpolation inequality ||S||_(p,1) <= c_p ||S||_1^(1/p) ||S||^(1-1/p),
/// from splitting the alternate sum at N = ||S||_1 / ||S||.
inline double interpolation_constant(double p) { return p + 1.0 - 1.0 / p; }

/// C_p with ||T||_(p,1) <= C_p (rank T)^(1/p) ||T|| for rank up to n.
inline double rank_constant(double p, std::size_t rank) {
    if (rank == 0) return 0.0;
    double s = 0.0;
    for (std::size_t n = 1; n <= rank; ++n) s += std::pow(static_cast<double>(n), -1.0 + 1.0 / p);
    return s / std::pow(static_cast<double>(rank), 1.0 / p);
}

/// alpha(lambda) = #{eigenvalues of |D| <= lambda}
inline std::vector<long> counting_function(const TruncatedTriple& t, const std::vector<double>& lambdas) {
    const auto spec = t.abs_spectrum().first;
    std::vector<long> out;
    for (double l : lambdas)
        out.push_back(static_cast<long>(std::upper_bound(spec.begin(), spec.end(), l * (1.0 + 1e-12)) - spec.begin()));
    return out;
}

namespace detail {

struct LineFit {
    double slope = 0.0, intercept = 0.0, stderr_ = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const auto n = x.size();
    if (n < 2) return f;
    const double dn = static_cast<double>(n);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / dn;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / dn;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - f.intercept - f.slope * x[i];
        ss += e * e;
    }
    f.stderr_ = n > 2 ? std::sqrt(ss / (dn - 2.0) / sxx) : 0.0;
    return f;
}

}  // namespace detail

/// Slope of log mu_n(|D|^-1) against log n over n in [dim/8, dim/2]; estimates -1/p.
inline AsymptoticEstimate dimension_fit(const TruncatedTriple& t) {
    const auto dim = t.hilbert_dim();
    if (dim < 64) throw Error("dimension_fit: need at least 64 basis vectors");
    const auto spec = t.abs_spectrum().first;  // ascending |D| = descending mu
    AsymptoticEstimate e;
    if (spec.front() == spec.back()) {
        e.diagnostic = std::numeric_limits<double>::quiet_NaN();
        e.extras["degenerate"] = 1.0;
        return e;
    }
    const std::size_t lo = static_cast<std::size_t>(dim / 8), hi = static_cast<std::size_t>(dim / 2);
    std::vector<double> x, y;
    for (std::size_t n = std::max<std::size_t>(lo, 1); n <= hi; ++n) {
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(-std::log(spec[n - 1]));
        e.window_values.push_back(y.back());
    }
    const auto f = detail::least_squares(x, y);
    e.value = f.slope;
    e.stderr_ = f.stderr_;
    double sup = 0.0;
    const double inv_p = 1.0 / t.p;
    for (std::size_t n = 1; n <= hi; ++n) sup = std::max(sup, std::pow(static_cast<double>(n), inv_p) / spec[n - 1]);
    e.extras["sup_n_mu"] = sup;
    e.extras["window_lo"] = static_cast<double>(lo);
    e.extras["window_hi"] = static_cast<double>(hi);
    e.converged = true;
    return e;
}

inline CheckReport dimension_check(const TruncatedTriple& t, double tol = 0.05) {
    CheckReport r;
    r.name = "dimension";
    const auto e = dimension_fit(t);
    if (e.extras.count("degenerate")) {
        r.diagnostics.push_back("degenerate spectrum");
        return r;
    }
    r.residuals["slope"] = e.value;
    r.residuals["sup_n_mu"] = e.extras.at("sup_n_mu");
    r.residual("slope_error", std::abs(e.value + 1.0 / t.p), tol);
    r.decide_from_residuals();
    return r;
}

}  // namespace sgeo

#endif  // SGEO_SPECTRAL_HPP
