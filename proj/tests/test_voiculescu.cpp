// The obstruction k_J: global and localized estimates, the rank bound on
// every cutoff, and the commutator decay estimate.

#include "sgeo/voiculescu.hpp"
#include "sgeo/geometries.hpp"

#include <gtest/gtest.h>

using namespace sgeo;

namespace {

const Model& circle64() {
    static const Model m = circle(64);
    return m;
}

}  // namespace

TEST(KjEstimate, ConstantCommutes) {
    const auto& t = circle64().triple;
    const auto one = t.fourier()->element("one", TrigPoly::constant(1, 2.0 * kPi, 1.0));
    const auto e = kj_estimate({one}, t, bump_cutoff());
    EXPECT_LT(e.value, 1e-12);
    EXPECT_TRUE(e.regime_ok);
}

TEST(KjEstimate, CosinePlateau) {
    const auto& t = circle64().triple;
    const auto e = kj_estimate({t.generator("cos")}, t, bump_cutoff());
    EXPECT_TRUE(e.regime_ok);
    EXPECT_GT(e.value, 0.1);
    // plateau: the three smallest eps agree within 10%
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < 3; ++i) lo = std::min(lo, e.per_epsilon[i].second), hi = std::max(hi, e.per_epsilon[i].second);
    EXPECT_LE(hi, 1.1 * lo);
}

TEST(KjEstimate, PurePointVanishes) {
    const auto& t = circle64().triple;
    const auto e = kj_estimate({pure_point_projection(t)}, t, bump_cutoff());
    EXPECT_LT(e.value, 1e-10);
}

TEST(KjEstimate, RejectsNonHermitian) {
    const auto& t = circle64().triple;
    EXPECT_THROW(kj_estimate({t.generator("u")}, t, bump_cutoff()), Error);
}

TEST(KjEstimate, RankBoundOnEveryCutoff) {
    // ||[A,a]||_(1,1) <= C_1 (2 rank A) ||[A,a]||
    const auto& t = circle64().triple;
    const auto& a = t.generator("cos");
    const auto f = bump_cutoff();
    const auto e = kj_estimate({a}, t, f);
    for (std::size_t i = 0; i < e.per_epsilon.size(); ++i) {
        const double ep = e.per_epsilon[i].first;
        const auto A = reconstruct(t.eigensystem(), [&](double v) { return std::clamp(f.f(ep * std::abs(v)), 0.0, 1.0); });
        const double nrm = op_norm_exact(commutator(A, a.op));
        const auto r = static_cast<std::size_t>(2 * e.ranks[i]);
        EXPECT_LE(e.per_epsilon[i].second, rank_constant(1.0, r) * static_cast<double>(r) * nrm * (1.0 + 1e-9)) << ep;
    }
}

TEST(LocalizedKj, FullRegionMatchesGlobal) {
    const auto& t = circle64().triple;
    const auto a = t.generator("cos");
    const double g = kj_estimate({a}, t, bump_cutoff()).value;
    const double l = localized_kj({a}, full_region(), t, bump_cutoff()).value;
    EXPECT_NEAR(l / g, 1.0, 0.02);
}

TEST(LocalizedKj, EmptyRegionIsZero) {
    const auto& t = circle64().triple;
    const auto e = localized_kj({t.generator("cos")}, empty_region(), t, bump_cutoff());
    EXPECT_EQ(e.value, 0.0);
}

TEST(LocalizedKj, ArcScalingAndMonotone) {
    const auto m = circle(128);
    const auto& t = m.triple;
    const auto a = t.generator("cos");
    std::vector<double> lx, ly, vals;
    for (double len : {kPi / 8, kPi / 4, kPi / 2}) {
        const auto e = localized_kj({a}, arc(kPi / 2, len), t, bump_cutoff());
        EXPECT_GE(e.remainder_order, 0.9) << len;
        vals.push_back(e.value);
        lx.push_back(std::log(len));
        ly.push_back(std::log(e.value));
    }
    EXPECT_NEAR(detail::least_squares(lx, ly).slope, 1.0, 0.15);
    for (std::size_t i = 1; i < vals.size(); ++i) EXPECT_GE(vals[i], vals[i - 1] / 1.02);
}

TEST(LocalizedKj, LambdaOfArcTracksLength) {
    // lambda(K) = inf_b Tr_w(b |D|^-1) >= 2 |K| / (2 pi)
    const auto& t = circle64().triple;
    const auto e = localized_kj({t.generator("cos")}, arc(0.0, kPi / 2), t, bump_cutoff());
    EXPECT_GE(e.extras.at("lambda_K"), 2.0 * 0.25 * 0.98);
    EXPECT_LT(e.extras.at("projection_defect"), 1e-10);
}

TEST(CommutatorDecay, CircleShiftBounded) {
    const auto& t = circle64().triple;
    const auto r = commutator_decay_check(t.generator("u"), t, bump_cutoff());
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_GT(r.residuals.at("C_f"), 0.0);
}

TEST(CommutatorDecay, ConstantVacuous) {
    const auto& t = circle64().triple;
    const auto one = t.fourier()->element("one", TrigPoly::constant(1, 2.0 * kPi, 1.0));
    const auto r = commutator_decay_check(one, t, bump_cutoff());
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(r.notes.at("vacuous"), "[D,a] = 0");
}

TEST(CommutatorConstant, BumpFinite) {
    const double c = commutator_constant(bump_cutoff());
    EXPECT_GT(c, 0.1);
    EXPECT_LT(c, 10.0);
}
