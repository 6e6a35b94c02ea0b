#include "uir/stats.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace uir;

namespace
{

std::vector<double> scaled(std::initializer_list<int> ks, double unit)
{
    std::vector<double> out;
    for (int k : ks)
        out.push_back(k * unit);
    return out;
}

ScoreTable two_system_table(std::vector<double> const& pa, std::vector<double> const& ra,
                            std::vector<double> const& pb, std::vector<double> const& rb)
{
    std::vector<std::string> cases;
    std::vector<double> v;
    for (std::size_t c = 0; c < pa.size(); ++c)
    {
        cases.push_back("c" + std::to_string(c));
        v.insert(v.end(), {pa[c], ra[c], pb[c], rb[c]});
    }
    return ScoreTable("t", cases, {"a", "b"}, {"p", "r"}, v);
}

} // namespace

TEST(Wilcoxon, AllZeroDifferences)
{
    std::vector<double> x{0.1, 0.2, 0.3};
    auto w = wilcoxon_signed_rank(x, x);
    EXPECT_EQ(w.p_value, 1.0);
    EXPECT_EQ(w.n_effective, 0u);
    EXPECT_FALSE(w.significant);
}

TEST(Wilcoxon, SmallExactCases)
{
    std::vector<double> const zeros(6, 0.0);
    auto x5 = scaled({1, 2, 3, 4, 5}, 0.1);
    std::vector<double> y5(5, 0.0);
    // 2 extreme assignments out of 32, frozen from the enumeration oracle
    ASSERT_EQ(oracle::wilcoxon_enumerated_p(x5, y5), 0.0625);
    auto w5 = wilcoxon_signed_rank(x5, y5);
    EXPECT_EQ(w5.w_minus, 0.0);
    EXPECT_EQ(w5.w_plus, 15.0);
    EXPECT_EQ(w5.p_value, 0.0625);
    EXPECT_FALSE(w5.significant);
    EXPECT_TRUE(w5.exact);

    auto x6 = scaled({1, 2, 3, 4, 5, 6}, 0.1);
    ASSERT_EQ(oracle::wilcoxon_enumerated_p(x6, zeros), 0.03125);
    auto w6 = wilcoxon_signed_rank(x6, zeros);
    EXPECT_EQ(w6.p_value, 0.03125);
    EXPECT_TRUE(w6.significant);
    EXPECT_EQ(w6.direction(), 1);
}

TEST(Wilcoxon, ExactMatchesEnumerationBitForBit)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 2000; ++trial)
    {
        std::size_t n = 1 + trial % 14;
        int levels    = 2 + trial % 9; // coarse grids force ties and zeros
        std::uniform_int_distribution<int> u(0, levels);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            x[i] = static_cast<double>(u(rng)) / levels;
            y[i] = static_cast<double>(u(rng)) / levels;
        }
        auto w = wilcoxon_signed_rank(x, y);
        if (w.n_effective > 12)
            continue;
        ASSERT_EQ(w.p_value, oracle::wilcoxon_enumerated_p(x, y)) << "trial " << trial;
        EXPECT_EQ(w.p_value, wilcoxon_signed_rank(y, x).p_value);
    }
}

TEST(Wilcoxon, NormalApproximationAboveCutoff)
{
    // reference values: two-sided normal approximation with tie and
    // continuity corrections, computed independently
    auto x = scaled({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25},
                    0.01);
    std::vector<double> y(x.size(), 0.0);
    auto w = wilcoxon_signed_rank(x, y);
    EXPECT_FALSE(w.exact);
    EXPECT_NEAR(w.p_value, 1.3070605478013029e-05, 1e-12);

    std::vector<double> d{0.1,  -0.2, 0.3,  0.3,  -0.05, 0.07, 0.2,  0.2,   0.11, -0.12, 0.13, 0.14,
                          0.15, -0.16, 0.17, 0.18, 0.19,  0.21, 0.22, -0.23, 0.24, 0.25,  0.05, 0.3};
    std::vector<double> zero(d.size(), 0.0);
    auto w2 = wilcoxon_signed_rank(d, zero);
    EXPECT_NEAR(w2.p_value, 0.005089929261759465, 1e-12);
    EXPECT_EQ(w2.n_effective, 24u);
}

TEST(Wilcoxon, RejectsUnpairedInput)
{
    std::vector<double> a{0.1, 0.2}, b{0.1};
    EXPECT_THROW(wilcoxon_signed_rank(a, b), DomainError);
    EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>{}, std::vector<double>{}), DomainError);
}

TEST(Categorize, Examples)
{
    std::vector<double> base(12, 0.5), up, down;
    for (int i = 1; i <= 12; ++i)
    {
        up.push_back(0.5 + 0.01 * i);
        down.push_back(0.5 - 0.01 * i);
    }
    // 12 all-positive distinct differences: exact p = 2/4096 on each metric
    ASSERT_LT(oracle::wilcoxon_enumerated_p(up, base), 0.05);

    auto same = two_system_table(base, base, base, base);
    EXPECT_EQ(categorize_improvement(same, "a", "b"), ImprovementCategory::non_significant);

    auto both = two_system_table(up, up, base, base);
    EXPECT_EQ(categorize_improvement(both, "a", "b"), ImprovementCategory::concordant_significant);
    EXPECT_EQ(categorize_improvement(both, "b", "a"), ImprovementCategory::concordant_significant);

    auto opposite = two_system_table(up, down, base, base);
    EXPECT_EQ(categorize_improvement(opposite, "a", "b"), ImprovementCategory::opposite_significant);
    EXPECT_EQ(categorize_improvement(opposite, "b", "a"), ImprovementCategory::opposite_significant);

    // one metric up significantly, the other unchanged
    auto one = two_system_table(up, base, base, base);
    EXPECT_EQ(categorize_improvement(one, "a", "b"), ImprovementCategory::concordant_significant);

    // a stricter level turns the same data non-significant
    EXPECT_EQ(categorize_improvement(both, "a", "b", 1e-4), ImprovementCategory::non_significant);

    ScoreTable three("t", {"1"}, {"a", "b"}, {"p", "r", "x"}, {0.1, 0.2, 0.3, 0.1, 0.2, 0.3});
    EXPECT_THROW(categorize_improvement(three, "a", "b"), DomainError);
}

TEST(Categorize, DirectionSymmetric)
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 300; ++trial)
    {
        auto t = oracle::random_table(rng, 6 + trial % 20, 2, 2, 20);
        EXPECT_EQ(categorize_improvement(t, 0, 1), categorize_improvement(t, 1, 0));
    }
}

TEST(FitBivariateNormal, Examples)
{
    std::vector<Vec2> constant(5, Vec2{0.25, -0.5});
    auto m = fit_bivariate_normal(constant);
    EXPECT_EQ(m.mean[0], 0.25);
    EXPECT_EQ(m.mean[1], -0.5);
    EXPECT_DOUBLE_EQ(m.covariance[0][0], 1e-9);
    EXPECT_DOUBLE_EQ(m.covariance[1][1], 1e-9);
    EXPECT_EQ(m.covariance[0][1], 0.0);
    EXPECT_GT(m.min_eigenvalue(), 0.0);

    std::vector<Vec2> cross{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    auto c = fit_bivariate_normal(cross);
    EXPECT_EQ(c.mean[0], 0.0);
    EXPECT_EQ(c.mean[1], 0.0);
    EXPECT_NEAR(c.covariance[0][0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.covariance[1][1], 2.0 / 3.0, 1e-15);
    EXPECT_EQ(c.covariance[0][1], 0.0);

    std::vector<Vec2> two{{1, 0}, {0, 1}};
    try
    {
        fit_bivariate_normal(two);
        FAIL();
    }
    catch (DomainError const& e)
    {
        EXPECT_STREQ(e.what(), "insufficient samples for parametric UIR");
    }
}

TEST(FitBivariateNormal, SymmetricAndPositiveDefinite)
{
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 500; ++trial)
    {
        std::vector<Vec2> s(3 + trial % 10);
        for (auto& v : s)
        {
            v[0] = u(rng);
            v[1] = trial % 4 == 0 ? 2 * v[0] : u(rng); // every 4th set is collinear
        }
        auto m = fit_bivariate_normal(s);
        EXPECT_NEAR(m.covariance[0][1], m.covariance[1][0], 1e-15);
        EXPECT_GT(m.min_eigenvalue(), 0.0);
    }
}

TEST(Orthant, AnalyticAnchors)
{
    BivariateNormalModel indep{{0, 0}, {{{1, 0}, {0, 1}}}};
    EXPECT_NEAR(orthant_probability(indep), 0.25, 1e-15);

    BivariateNormalModel perfect{{0, 0}, {{{1, 1}, {1, 1}}}};
    EXPECT_NEAR(orthant_probability(perfect), 0.5, 1e-15);

    // approaching perfect correlation: 1/4 + asin(rho)/(2 pi)
    for (double rho : {0.9, 0.99, 0.999999})
    {
        BivariateNormalModel m{{0, 0}, {{{2, 2 * rho}, {2 * rho, 2}}}};
        EXPECT_NEAR(orthant_probability(m), 0.25 + std::asin(rho) / (2 * std::numbers::pi), 1e-12);
    }
    BivariateNormalModel anti{{0, 0}, {{{1, -1}, {-1, 1}}}};
    EXPECT_NEAR(orthant_probability(anti), 0.0, 1e-15);
}

TEST(Orthant, WorkedExampleAgainstMonteCarlo)
{
    BivariateNormalModel m{{0.3, -0.1}, {{{0.04, 0.01}, {0.01, 0.09}}}};
    double const p = orthant_probability(m);
    auto mc        = oracle::monte_carlo_quadrants(m, 10'000'000, 101);
    EXPECT_NEAR(p, mc.pp, 5e-4);
    // conditional-normal quadrature to 1e-14, computed independently
    EXPECT_NEAR(p, 0.35252260688690557, 1e-9);
}

TEST(Orthant, QuadrantsSumToOne)
{
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> mean(-0.5, 0.5), sd(0.01, 0.5), rho(-0.999, 0.999);
    for (int trial = 0; trial < 2000; ++trial)
    {
        double s1 = sd(rng), s2 = sd(rng), r = rho(rng);
        BivariateNormalModel m{{mean(rng), mean(rng)}, {{{s1 * s1, r * s1 * s2}, {r * s1 * s2, s2 * s2}}}};
        auto q = quadrant_mass(m);
        EXPECT_NEAR(q.pp + q.pn + q.np + q.nn, 1.0, 1e-5);
        EXPECT_EQ(q.pp, orthant_probability(m));
        for (double v : {q.pp, q.pn, q.np, q.nn})
        {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Orthant, InvalidModelRejected)
{
    BivariateNormalModel zero_var{{0, 0}, {{{0, 0}, {0, 1}}}};
    EXPECT_THROW(orthant_probability(zero_var), DomainError);
    BivariateNormalModel asym{{0, 0}, {{{1, 0.1}, {0.2, 1}}}};
    EXPECT_THROW(orthant_probability(asym), DomainError);
}

TEST(ParametricUir, SymmetricDeltasGiveZero)
{
    // deltas (±0.1, ±0.2) in all four sign combinations
    std::vector<double> pa{0.6, 0.4, 0.6, 0.4}, ra{0.7, 0.7, 0.3, 0.3};
    std::vector<double> pb(4, 0.5), rb(4, 0.5);
    auto t = two_system_table(pa, ra, pb, rb);
    EXPECT_NEAR(parametric_uir(t, "a", "b"), 0.0, 1e-15);
}

TEST(ParametricUir, StrongImprovementApproachesOne)
{
    std::vector<double> pa, ra, pb(10, 0.2), rb(10, 0.2);
    for (int i = 0; i < 10; ++i)
    {
        pa.push_back(0.8 + 0.001 * i);
        ra.push_back(0.81 - 0.001 * i);
    }
    auto t  = two_system_table(pa, ra, pb, rb);
    double v = parametric_uir(t, "a", "b");
    EXPECT_GT(v, 1.0 - 1e-9);
    EXPECT_LE(v, 1.0);
}

TEST(ParametricUir, AntisymmetricAndMatchesMonteCarlo)
{
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 6; ++trial)
    {
        auto t = oracle::skilled_table(rng, {{0.55, 0.5}, {0.5, 0.52}}, 15, 0.08, "t");
        double v = parametric_uir(t, 0, 1);
        EXPECT_NEAR(v, -parametric_uir(t, 1, 0), 1e-12);

        std::vector<Vec2> deltas;
        for (std::size_t c = 0; c < t.num_cases(); ++c)
            deltas.push_back({t.cell(c, 0)[0] - t.cell(c, 1)[0], t.cell(c, 0)[1] - t.cell(c, 1)[1]});
        auto mc = oracle::monte_carlo_quadrants(fit_bivariate_normal(deltas), 2'000'000, 200 + trial);
        EXPECT_NEAR(v, mc.pp - mc.nn, 2e-3);
    }
}

TEST(ParametricUir, Preconditions)
{
    auto t = fixtures::ten_cases();
    EXPECT_NO_THROW(parametric_uir(t, "A", "B"));
    ScoreTable few("t", {"1", "2"}, {"a", "b"}, {"p", "r"}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
    EXPECT_THROW(parametric_uir(few, "a", "b"), DomainError);
}
