// Characteristic values, (p,1) norms, counting function, dimension fit,
// Cesaro means, Dixmier and heat functionals, absolute continuity.

#include "sgeo/dixmier.hpp"
#include "sgeo/geometries.hpp"
#include "suites.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sgeo;

namespace {

MatrixOperator diag_op(std::initializer_list<double> v) { return MatrixOperator::diagonal(std::vector<double>(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// characteristic values

TEST(SingularProfile, DiagonalExample) {
    const auto p = singular_profile(diag_op({3, 1, 2}));
    EXPECT_EQ(p.mu, (std::vector<double>{3, 2, 1}));
    EXPECT_EQ(p.sigma, (std::vector<double>{3, 5, 6}));
}

TEST(SingularProfile, UnitaryInvariance) {
    std::mt19937_64 rng(11);
    const Dense x = suites::random_matrix(rng, 12);
    const Dense u = Eigen::HouseholderQR<Dense>(suites::random_matrix(rng, 12)).householderQ();
    const auto a = suites::dense_profile(x), b = suites::dense_profile(u * x * u.adjoint());
    for (std::size_t n = 0; n < a.mu.size(); ++n) EXPECT_NEAR(a.mu[n], b.mu[n], 1e-10 * a.mu[0]);
}

TEST(SingularProfile, Zero) {
    const auto p = singular_profile(MatrixOperator::zero(5));
    for (double m : p.mu) EXPECT_EQ(m, 0.0);
    EXPECT_EQ(p.trace_norm(), 0.0);
}

TEST(Lp1Norm, PEqualsOneIsTraceNorm) { EXPECT_DOUBLE_EQ(lp1_norm(diag_op({3, 1, 2}), 1.0).primary, 6.0); }

TEST(Lp1Norm, RankOneIsOperatorNorm) {
    Dense x = Dense::Zero(6, 6);
    x(2, 4) = cd(0.0, 2.5);
    EXPECT_NEAR(lp1_norm(MatrixOperator::from_dense(x), 2.0).primary, 2.5, 1e-14);
}

TEST(Lp1Norm, FormsEquivalentOnRandom64) {
    std::mt19937_64 rng(5);
    const auto l = lp1_norm(suites::dense_profile(suites::random_matrix(rng, 64)), 2.0);
    const double ratio = l.primary / l.alternate;
    EXPECT_GE(ratio, 0.25);
    EXPECT_LE(ratio, 4.0);
}

TEST(NormInequalities, RandomSweep) {
    for (const auto& l : suites::norm_suite(60, 21)) EXPECT_TRUE(l.ok()) << l.name << " worst " << l.worst;
}

TEST(RankConstant, HarmonicForPOne) {
    // p = 1: C_1(N) = N / N
    EXPECT_DOUBLE_EQ(rank_constant(1.0, 7), 1.0);
    // p = 2, N = 1: single term
    EXPECT_DOUBLE_EQ(rank_constant(2.0, 1), 1.0);
}

// ---------------------------------------------------------------------------
// counting function and dimension

TEST(CountingFunction, CircleSmall) {
    const auto c = circle(4);
    const auto a = counting_function(c.triple, {2.5, 0.0});
    EXPECT_EQ(a[0], 5);  // n in -2..2, kernel shifted to 1
    EXPECT_EQ(a[1], 0);
}

TEST(CountingFunction, TorusWeylLaw) {
    const auto t = torus(2, 32);
    // two spinor components: alpha(lambda) ~ 2 pi (lambda / 2 pi)^2 = lambda^2 / (2 pi)
    for (double frac : {0.6, 0.8, 0.95}) {
        const double l = frac * 2.0 * kPi * 32;
        const double a = static_cast<double>(counting_function(t.triple, {l})[0]);
        EXPECT_NEAR(a * 2.0 * kPi / (l * l), 1.0, 0.05) << frac;
    }
}

TEST(DimensionFit, CircleSlope) {
    const auto e = dimension_fit(circle(256).triple);
    EXPECT_NEAR(e.value, -1.0, 0.05);
    EXPECT_EQ(dimension_check(circle(256).triple).verdict, Verdict::pass);
}

TEST(DimensionFit, TorusSlope) { EXPECT_NEAR(dimension_fit(torus(2, 32).triple).value, -0.5, 0.05); }

TEST(DimensionFit, ProductLadderDegrades) {
    const auto base = torus(2, 8);
    double prev_err = -1.0, prev_sup = 0.0, first_sup = 0.0;
    Verdict last = Verdict::pass;
    for (int L : {1, 4, 16, 64}) {
        std::vector<double> ladder;
        for (int j = 0; j < L; ++j) ladder.push_back(j);
        const auto p = product_triple(base.triple, ladder);
        const auto e = dimension_fit(p.triple);
        const double err = std::abs(e.value + 0.5);
        const double sup = e.extras.at("sup_n_mu");
        EXPECT_GE(err, prev_err) << L;
        EXPECT_GE(sup, prev_sup) << L;
        if (L == 1) {
            first_sup = sup;
            EXPECT_EQ(dimension_check(p.triple).verdict, Verdict::pass);
        }
        prev_err = err;
        prev_sup = sup;
        last = dimension_check(p.triple).verdict;
    }
    EXPECT_GT(prev_sup, first_sup);
    EXPECT_EQ(last, Verdict::fail);
}

// ---------------------------------------------------------------------------
// Cesaro means

TEST(Cesaro, ConstantIsFixed) {
    std::vector<double> t, f;
    for (int i = 0; i < 64; ++i) t.push_back(0.1 * i), f.push_back(3.0);
    for (double v : cesaro_mean(t, f)) EXPECT_NEAR(v, 3.0, 1e-14);
}

TEST(Cesaro, CosineOfLog) {
    // M(cos log)(lambda) = sin(log lambda) / log lambda with lambda_0 = 1
    std::vector<double> t, f;
    const int n = 512;
    for (int i = 0; i < n; ++i) {
        t.push_back(20.0 * i / (n - 1));
        f.push_back(std::cos(t.back()));
    }
    const auto m = cesaro_mean(t, f);
    for (int i = 1; i < n; ++i) EXPECT_NEAR(m[static_cast<std::size_t>(i)], std::sin(t[static_cast<std::size_t>(i)]) / t[static_cast<std::size_t>(i)], 1e-3);
}

TEST(Cesaro, AsymptoticScaleInvariance) {
    // |M(theta_mu f) - M(f)| <= 2 log(mu) sup|f| / log(lambda / lambda_0)
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    double amp[5], w[5], ph[5];
    for (int j = 0; j < 5; ++j) amp[j] = 0.2 * ud(rng), w[j] = 3.0 * std::abs(ud(rng)) + 0.1, ph[j] = 3.0 * ud(rng);
    auto f = [&](double s) {
        double v = 0.0;
        for (int j = 0; j < 5; ++j) v += amp[j] * std::cos(w[j] * s + ph[j]);
        return v;
    };
    std::vector<double> t, a, b;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        t.push_back(40.0 * i / (n - 1));
        a.push_back(f(t.back()));
        b.push_back(f(t.back() - std::log(2.0)));
    }
    EXPECT_LE(std::abs(cesaro_mean(t, a).back() - cesaro_mean(t, b).back()), 0.05);
}

// ---------------------------------------------------------------------------
// Dixmier and heat

TEST(Dixmier, CircleIdentityIsTwo) {
    const auto c = circle(256);
    const auto e = dixmier_estimate(MatrixOperator::identity(c.triple.hilbert_dim()), c.triple);
    EXPECT_NEAR(e.value, 2.0, 0.05);
}

TEST(Dixmier, TorusIdentityIsWeylConstant) {
    const auto t = torus(2, 32);
    const auto e = dixmier_estimate(MatrixOperator::identity(t.triple.hilbert_dim()), t.triple);
    EXPECT_NEAR(e.value * 2.0 * kPi, 1.0, 0.05);
}

TEST(Dixmier, ZeroOperator) {
    const auto c = circle(64);
    EXPECT_NEAR(dixmier_estimate(MatrixOperator::zero(c.triple.hilbert_dim()), c.triple).value, 0.0, 1e-14);
}

TEST(Dixmier, MultiplicationReadsMean) {
    // Tr_w(b |D|^-1) = 2 * mean(b) on the circle
    const auto c = circle(128);
    const auto& fs = *c.triple.fourier();
    auto sym = TrigPoly::constant(1, fs.period(), 0.75) + TrigPoly::cosine(1, fs.period(), 0);
    EXPECT_NEAR(dixmier_linear(fs.realize(sym), c.triple).value, 1.5, 0.03);
}

TEST(Heat, CircleTriangle) {
    const auto c = circle(256);
    const auto e = heat_functional(MatrixOperator::identity(c.triple.hilbert_dim()), triangle_cutoff(), c.triple);
    EXPECT_NEAR(e.value, 1.0, 0.03);
}

TEST(Heat, Linear) {
    const auto c = circle(64);
    const auto& fs = *c.triple.fourier();
    const auto x = fs.realize(TrigPoly::constant(1, fs.period(), 1.0) + TrigPoly::cosine(1, fs.period(), 0));
    const auto a = heat_functional(x, bump_cutoff(), c.triple), b = heat_functional(2.0 * x, bump_cutoff(), c.triple);
    EXPECT_NEAR(b.value, 2.0 * a.value, 1e-12 * std::abs(a.value));
}

TEST(Heat, TorusTriangle) {
    const auto t = torus(2, 32);
    const auto e = heat_functional(MatrixOperator::identity(t.triple.hilbert_dim()), triangle_cutoff(), t.triple);
    EXPECT_NEAR(e.value * 6.0 * kPi, 1.0, 0.05);
}

TEST(HeatVsDixmier, CircleTriangle) {
    const auto c = circle(256);
    const auto r = heat_vs_dixmier(MatrixOperator::identity(c.triple.hilbert_dim()), triangle_cutoff(), c.triple);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LE(r.residuals.at("relative_gap"), 0.07);
    EXPECT_NEAR(r.residuals.at("rho"), 0.5, 1e-6);
}

TEST(HeatVsDixmier, TorusBump) {
    const auto t = torus(2, 32);
    EXPECT_EQ(heat_vs_dixmier(MatrixOperator::identity(t.triple.hilbert_dim()), bump_cutoff(), t.triple).verdict, Verdict::pass);
}

TEST(HeatVsDixmier, MeanZeroFunction) {
    const auto t = torus(2, 16);
    const auto r = heat_vs_dixmier(t.triple.generator("cos1").op, bump_cutoff(), t.triple);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_NEAR(r.residuals.at("heat"), 0.0, 1e-6);
    EXPECT_NEAR(r.residuals.at("dixmier"), 0.0, 1e-6);
}

// ---------------------------------------------------------------------------
// absolute continuity

TEST(AbsoluteContinuity, CircleKappaHalf) {
    const auto c = circle(128);
    const auto r = absolute_continuity_fit(c.triple, suites::continuity_samples(c.triple, 8, 17));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_NEAR(r.residuals.at("kappa"), 0.5, 0.015);
}

TEST(AbsoluteContinuity, ZeroVectorSkipped) {
    const auto c = circle(64);
    auto s = suites::continuity_samples(c.triple, 6, 2);
    s[1].xi.setZero();
    const auto r = absolute_continuity_fit(c.triple, s);
    EXPECT_EQ(r.residuals.at("skipped"), 1.0);
    EXPECT_EQ(r.residuals.at("samples"), 5.0);
}

TEST(AbsoluteContinuity, TorusSingleKappa) {
    const auto t = torus(2, 16);
    const auto r = absolute_continuity_fit(t.triple, suites::continuity_samples(t.triple, 8, 5));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_NEAR(r.residuals.at("kappa") / (2.0 * kPi), 1.0, 0.03);
}

TEST(AbsoluteContinuity, TooFewSamplesThrows) {
    const auto c = circle(32);
    EXPECT_THROW(absolute_continuity_fit(c.triple, suites::continuity_samples(c.triple, 3, 1)), Error);
}
