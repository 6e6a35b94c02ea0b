#pragma once

// Wilcoxon signed-rank test, the three-way significance categorisation of a
// system pair, and the parametric UIR obtained from a bivariate normal fitted
// to per-case score differences.

#include "uir/data_model.hpp"
#include "uir/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uir
{

inline constexpr double default_significance_level = 0.05;

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

inline constexpr std::size_t wilcoxon_exact_limit = 20;

struct WilcoxonResult
{
    double w_plus      = 0; ///< rank sum of positive differences (x > y)
    double w_minus     = 0; ///< rank sum of negative differences
    double w_statistic = 0; ///< min(W+, W-)
    std::size_t n_effective = 0;
    double p_value     = 1;
    bool significant   = false;
    bool exact         = true;

    /// +1 when x tends to exceed y, -1 when y tends to exceed x, 0 otherwise.
    int direction() const noexcept { return w_plus > w_minus ? 1 : (w_plus < w_minus ? -1 : 0); }
};

namespace detail
{

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Doubled average ranks of |d| (ascending), so tied groups stay integral.
inline std::vector<std::uint64_t> doubled_ranks(std::span<const double> absd,
                                                std::vector<std::size_t>* tie_sizes = nullptr)
{
    std::vector<std::size_t> order(absd.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return absd[a] < absd[b]; });

    std::vector<std::uint64_t> ranks(absd.size());
    std::size_t i = 0;
    while (i < order.size())
    {
        std::size_t j = i;
        while (j + 1 < order.size() && absd[order[j + 1]] == absd[order[i]])
            ++j;
        // positions i..j hold ranks i+1..j+1; the doubled average is (i+1)+(j+1)
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = (i + 1) + (j + 1);
        if (tie_sizes && j > i)
            tie_sizes->push_back(j - i + 1);
        i = j + 1;
    }
    return ranks;
}

} // namespace detail

/// Two-sided paired signed-rank test on x - y. Zero differences are dropped,
/// tied magnitudes get average ranks. Up to `wilcoxon_exact_limit` non-zero
/// differences the null distribution is enumerated exactly; above that the
/// normal approximation with tie and continuity corrections is used.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                           double level = default_significance_level)
{
    if (x.size() != y.size() || x.empty())
        throw DomainError("wilcoxon: samples must be paired and non-empty");

    std::vector<double> absd;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double d = x[i] - y[i];
        if (d == 0.0)
            continue;
        absd.push_back(std::fabs(d));
        positive.push_back(d > 0.0);
    }

    WilcoxonResult out;
    out.n_effective = absd.size();
    if (absd.empty())
        return out;

    std::vector<std::size_t> ties;
    auto const ranks = detail::doubled_ranks(absd, &ties);
    std::uint64_t plus2 = 0, total2 = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i)
    {
        total2 += ranks[i];
        if (positive[i])
            plus2 += ranks[i];
    }
    out.w_plus      = static_cast<double>(plus2) / 2.0;
    out.w_minus     = static_cast<double>(total2 - plus2) / 2.0;
    out.w_statistic = std::min(out.w_plus, out.w_minus);

    auto const n = absd.size();
    if (n <= wilcoxon_exact_limit)
    {
        // counts[s] = number of sign assignments whose doubled W+ equals s
        std::vector<std::uint64_t> counts(total2 + 1, 0);
        counts[0] = 1;
        std::uint64_t reach = 0;
        for (auto r : ranks)
        {
            for (std::uint64_t s = reach + 1; s-- > 0;)
                if (counts[s])
                    counts[s + r] += counts[s];
            reach += r;
        }
        // proportional to |W+ - E[W+]|
        auto dist = [&](std::uint64_t s) {
            return s * 2 > total2 ? s * 2 - total2 : total2 - s * 2;
        };
        auto const observed = dist(plus2);
        std::uint64_t extreme = 0;
        for (std::uint64_t s = 0; s <= total2; ++s)
            if (counts[s] && dist(s) >= observed)
                extreme += counts[s];
        out.p_value = std::ldexp(static_cast<double>(extreme), -static_cast<int>(n));
        out.exact   = true;
    }
    else
    {
        double const nn   = static_cast<double>(n);
        double const mean = nn * (nn + 1.0) / 4.0;
        double var        = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        for (auto t : ties)
        {
            double const tt = static_cast<double>(t);
            var -= (tt * tt * tt - tt) / 48.0;
        }
        double const num = std::fabs(out.w_plus - mean) - 0.5;
        out.p_value      = num <= 0.0 ? 1.0 : std::erfc(num / std::sqrt(var) / std::numbers::sqrt2);
        out.exact        = false;
    }
    out.p_value     = std::clamp(out.p_value, 0.0, 1.0);
    out.significant = out.p_value < level;
    return out;
}

// ---------------------------------------------------------------------------
// Improvement categories

enum class ImprovementCategory
{
    concordant_significant,
    opposite_significant,
    non_significant,
};

inline char const* to_string(ImprovementCategory c)
{
    switch (c)
    {
    case ImprovementCategory::concordant_significant: return "concordant_significant";
    case ImprovementCategory::opposite_significant: return "opposite_significant";
    case ImprovementCategory::non_significant: return "non_significant";
    }
    return "?";
}

/// Runs one Wilcoxon test per metric. Opposite: one metric significantly up
/// and the other significantly down. Concordant: at least one significant
/// change and all significant changes point the same way. The categories do
/// not depend on the order of a and b.
inline ImprovementCategory categorize_improvement(ScoreTable const& table, std::size_t a, std::size_t b,
                                                  double level = default_significance_level)
{
    if (table.num_metrics() != 2)
        throw DomainError("categorize_improvement needs exactly 2 metrics, table has " +
                          std::to_string(table.num_metrics()));
    int ups = 0, downs = 0;
    for (std::size_t m = 0; m < 2; ++m)
    {
        auto const xa = table.column(a, m);
        auto const xb = table.column(b, m);
        auto const w  = wilcoxon_signed_rank(xa, xb, level);
        if (!w.significant)
            continue;
        (w.direction() > 0 ? ups : downs) += 1;
    }
    if (ups > 0 && downs > 0)
        return ImprovementCategory::opposite_significant;
    if (ups > 0 || downs > 0)
        return ImprovementCategory::concordant_significant;
    return ImprovementCategory::non_significant;
}

inline ImprovementCategory categorize_improvement(ScoreTable const& table, std::string_view a,
                                                  std::string_view b,
                                                  double level = default_significance_level)
{
    return categorize_improvement(table, table.system_index(a), table.system_index(b), level);
}

// ---------------------------------------------------------------------------
// Bivariate normal

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

inline constexpr double covariance_floor = 1e-9;

struct BivariateNormalModel
{
    Vec2 mean{};
    Mat2 covariance{};

    double correlation() const
    {
        double r = covariance[0][1] / std::sqrt(covariance[0][0] * covariance[1][1]);
        return std::clamp(r, -1.0, 1.0);
    }

    double min_eigenvalue() const
    {
        double const a = covariance[0][0], b = covariance[0][1], c = covariance[1][1];
        return 0.5 * (a + c) - std::hypot(0.5 * (a - c), b);
    }
};

/// Sample mean and unbiased covariance. A covariance whose smallest eigenvalue
/// falls below `covariance_floor` gets the floor added to its diagonal.
inline BivariateNormalModel fit_bivariate_normal(std::span<const Vec2> samples)
{
    if (samples.size() < 3)
        throw DomainError("insufficient samples for parametric UIR");
    double const n = static_cast<double>(samples.size());
    BivariateNormalModel m;
    for (auto const& s : samples)
    {
        m.mean[0] += s[0];
        m.mean[1] += s[1];
    }
    m.mean[0] /= n;
    m.mean[1] /= n;

    double sxx = 0, sxy = 0, syy = 0;
    for (auto const& s : samples)
    {
        double const dx = s[0] - m.mean[0];
        double const dy = s[1] - m.mean[1];
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    m.covariance = {{{sxx / (n - 1), sxy / (n - 1)}, {sxy / (n - 1), syy / (n - 1)}}};
    if (m.min_eigenvalue() < covariance_floor)
    {
        m.covariance[0][0] += covariance_floor;
        m.covariance[1][1] += covariance_floor;
    }
    return m;
}

namespace detail
{

/// Gauss-Legendre rule on [-1,1]; only the nodes in (-1,0) with their weights,
/// the rule being symmetric.
template <std::size_t N>
struct HalfGaussLegendre
{
    std::array<double, N / 2> x{};
    std::array<double, N / 2> w{};

    HalfGaussLegendre()
    {
        for (std::size_t i = 0; i < N / 2; ++i)
        {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1, p1 = z;
                for (std::size_t k = 2; k <= N; ++k)
                {
                    double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                    p0 = p1;
                    p1 = pk;
                }
                dp = static_cast<double>(N) * (z * p1 - p0) / (z * z - 1.0);
                double const dz = p1 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-16)
                    break;
            }
            x[i] = -z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

template <std::size_t N>
HalfGaussLegendre<N> const& gauss_legendre()
{
    static HalfGaussLegendre<N> const rule;
    return rule;
}

template <std::size_t N>
double bvn_upper_impl(double h, double k, double r)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto const& gl = gauss_legendre<N>();
    double hk  = h * k;
    double bvn = 0;

    if (std::fabs(r) < 0.925)
    {
        double const hs  = (h * h + k * k) / 2.0;
        double const asr = std::asin(r);
        for (std::size_t i = 0; i < N / 2; ++i)
        {
            double sn = std::sin(asr * (1.0 - gl.x[i]) / 2.0);
            bvn += gl.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            sn = std::sin(asr * (1.0 + gl.x[i]) / 2.0);
            bvn += gl.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
    }

    if (r < 0)
    {
        k  = -k;
        hk = -hk;
    }
    if (std::fabs(r) < 1.0)
    {
        double const as = (1.0 - r) * (1.0 + r);
        double a        = std::sqrt(as);
        double const bs = (h - k) * (h - k);
        double const c  = (4.0 - hk) / 8.0;
        double const d  = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-(bs / as + hk) / 2.0) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0)
        {
            double const b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (std::size_t i = 0; i < N / 2; ++i)
        {
            for (double sign : {-1.0, 1.0})
            {
                double const xs = (a * (sign * gl.x[i] + 1.0)) * (a * (sign * gl.x[i] + 1.0));
                double const rs = std::sqrt(1.0 - xs);
                bvn += a * gl.w[i] *
                       (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                        std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
        bvn = -bvn / two_pi;
    }
    if (r > 0)
        return bvn + normal_cdf(-std::max(h, k));
    bvn = -bvn;
    if (k > h)
    {
        if (h < 0)
            bvn += normal_cdf(k) - normal_cdf(h);
        else
            bvn += normal_cdf(-h) - normal_cdf(-k);
    }
    return bvn;
}

} // namespace detail

/// P(X > h, Y > k) for standard normals with correlation r, by Genz's
/// Gauss-Legendre evaluation of the Drezner-Wesolowsky correlation integral
/// (double-precision accuracy). r = ±1 is handled exactly.
inline double bvn_upper(double h, double k, double r)
{
    r = std::clamp(r, -1.0, 1.0);
    double p = 0;
    if (std::fabs(r) < 0.3)
        p = detail::bvn_upper_impl<6>(h, k, r);
    else if (std::fabs(r) < 0.75)
        p = detail::bvn_upper_impl<12>(h, k, r);
    else
        p = detail::bvn_upper_impl<20>(h, k, r);
    // + 0.0 folds a clamped -0.0 into +0.0
    return std::clamp(p, 0.0, 1.0) + 0.0;
}

struct QuadrantMass
{
    double pp = 0; ///< x >= 0, y >= 0
    double pn = 0; ///< x >= 0, y <= 0
    double np = 0; ///< x <= 0, y >= 0
    double nn = 0; ///< x <= 0, y <= 0
};

namespace detail
{

inline void check_model(BivariateNormalModel const& m)
{
    auto const& c = m.covariance;
    if (!(c[0][0] > 0.0) || !(c[1][1] > 0.0) || !std::isfinite(c[0][0]) || !std::isfinite(c[1][1]))
        throw DomainError("bivariate normal: variances must be positive and finite");
    if (c[0][1] != c[1][0])
        throw DomainError("bivariate normal: covariance not symmetric");
    if (!std::isfinite(m.mean[0]) || !std::isfinite(m.mean[1]))
        throw DomainError("bivariate normal: non-finite mean");
}

} // namespace detail

inline QuadrantMass quadrant_mass(BivariateNormalModel const& m)
{
    detail::check_model(m);
    double const zx = m.mean[0] / std::sqrt(m.covariance[0][0]);
    double const zy = m.mean[1] / std::sqrt(m.covariance[1][1]);
    double const r  = m.correlation();
    return {bvn_upper(-zx, -zy, r), bvn_upper(-zx, zy, -r), bvn_upper(zx, -zy, -r), bvn_upper(zx, zy, r)};
}

/// Mass of the model on {x >= 0, y >= 0}.
inline double orthant_probability(BivariateNormalModel const& m)
{
    detail::check_model(m);
    return bvn_upper(-m.mean[0] / std::sqrt(m.covariance[0][0]), -m.mean[1] / std::sqrt(m.covariance[1][1]),
                     m.correlation());
}

/// P(a >=∀ b) - P(b >=∀ a) under a bivariate normal fitted to the per-case
/// differences (score_a - score_b) of a two-metric table.
inline double parametric_uir(ScoreTable const& table, std::size_t a, std::size_t b)
{
    if (table.num_metrics() != 2)
        throw DomainError("parametric UIR needs exactly 2 metrics, table has " +
                          std::to_string(table.num_metrics()));
    std::vector<Vec2> deltas;
    deltas.reserve(table.num_cases());
    for (std::size_t c = 0; c < table.num_cases(); ++c)
    {
        auto const& qa = table.cell(c, a);
        auto const& qb = table.cell(c, b);
        deltas.push_back({qa[0] - qb[0], qa[1] - qb[1]});
    }
    auto const model = fit_bivariate_normal(deltas);
    auto const q     = quadrant_mass(model);
    return q.pp - q.nn;
}

inline double parametric_uir(ScoreTable const& table, std::string_view a, std::string_view b)
{
    return parametric_uir(table, table.system_index(a), table.system_index(b));
}

} // namespace uir
