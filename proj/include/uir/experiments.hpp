#pragma once

// Analysis protocols built on top of the pairwise measures: F curves over α,
// the UIR threshold sweep, and the cross-collection predictor evaluation.

#include "uir/data_model.hpp"
#include "uir/error.hpp"
#include "uir/metrics.hpp"
#include "uir/stats.hpp"
#include "uir/unanimous.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uir
{

// ---------------------------------------------------------------------------
// Grids

/// start, start+step, ... up to stop inclusive. Values are snapped to 1e-12 so
/// decimal grids hit their nominal points (0.25 is 0.25, not 0.25000000000000006).
inline std::vector<double> linear_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop))
        throw DomainError("grid: need start <= stop and step > 0");
    auto const n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

/// Parses `start:stop:step`.
inline std::vector<double> parse_grid(std::string_view text)
{
    auto parts = detail::split(text, ':');
    if (parts.size() != 3)
        throw DomainError("grid '" + std::string(text) + "': expected start:stop:step");
    std::array<double, 3> v{};
    for (std::size_t i = 0; i < 3; ++i)
    {
        auto d = detail::parse_double(parts[i]);
        if (!d)
            throw DomainError("grid '" + std::string(text) + "': invalid number '" + std::string(parts[i]) + "'");
        v[i] = *d;
    }
    return linear_grid(v[0], v[1], v[2]);
}

/// The α grid used for "improves for every α": 101 evenly spaced points on [0,1].
inline std::vector<double> unit_alpha_grid() { return linear_grid(0.0, 1.0, 0.01); }

// ---------------------------------------------------------------------------
// α sweep

struct AlphaSweep
{
    std::vector<double> alphas;
    std::vector<std::string> systems;
    std::vector<std::vector<double>> curves; ///< curves[s][i] = mean F at alphas[i]
};

/// Mean F_α of each system (all systems when `systems` is empty) at each grid point.
inline AlphaSweep alpha_sweep(ScoreTable const& table, std::vector<std::string> systems,
                              std::vector<double> const& grid, PairColumns cols)
{
    if (grid.empty())
        throw DomainError("alpha_sweep: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw DomainError("alpha_sweep: grid must be sorted");
    std::vector<Alpha> alphas;
    for (double a : grid)
        alphas.emplace_back(a);
    if (systems.empty())
        systems = table.systems();

    AlphaSweep out;
    out.alphas  = grid;
    out.systems = std::move(systems);
    for (auto const& id : out.systems)
    {
        auto const s = table.system_index(id);
        std::vector<double> curve;
        curve.reserve(alphas.size());
        for (auto a : alphas)
            curve.push_back(mean_f(table, s, cols, a));
        out.curves.push_back(std::move(curve));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Threshold sweep

struct ThresholdSweepRow
{
    double t                = 0;
    std::size_t accepted    = 0; ///< ordered pairs with UIR > t
    double accepted_ratio   = 0;
    double concordant_ratio = 0;
    double opposite_ratio   = 0;
    double all_alpha_ratio  = 0;
    double f_ratio          = 0; ///< positive mean-F difference at the configured α
    bool empty_accepted     = false; ///< conditioned ratios are 0 by convention
};

/// Per-pair facts the sweep conditions on.
struct PairProfile
{
    std::size_t a = 0, b = 0;
    double uir = 0;
    ImprovementCategory category = ImprovementCategory::non_significant;
    bool improves_all_alpha = false; ///< meanF_α(a) > meanF_α(b) for every α of the unit grid
    bool improves_f         = false; ///< meanF_α(a) > meanF_α(b) at the configured α
};

inline std::vector<PairProfile> pair_profiles(ScoreTable const& pair_table, Alpha alpha,
                                              double level = default_significance_level)
{
    PairColumns const cols{0, 1};
    UirMatrix const m(pair_table);
    auto const f = mean_f_all(pair_table, cols, alpha);

    std::vector<std::vector<double>> f_grid; // f_grid[i][s]
    for (double a : unit_alpha_grid())
        f_grid.push_back(mean_f_all(pair_table, cols, Alpha(a)));

    std::vector<PairProfile> out;
    for (auto [a, b] : m.pairs())
    {
        PairProfile p;
        p.a        = a;
        p.b        = b;
        p.uir      = m.at(a, b).value;
        p.category = categorize_improvement(pair_table, a, b, level);
        p.improves_all_alpha =
            std::all_of(f_grid.begin(), f_grid.end(), [&](auto const& col) { return col[a] > col[b]; });
        p.improves_f = f[a] > f[b];
        out.push_back(p);
    }
    return out;
}

/// For each threshold t, the share of ordered pairs with UIR > t and, within
/// that accepted set, the shares of concordant / opposite significant
/// improvements, of pairs improving F for all α, and of pairs improving F at α.
inline std::vector<ThresholdSweepRow> threshold_sweep(ScoreTable const& table, std::vector<double> const& grid,
                                                      Alpha alpha, std::optional<MetricPairChoice> choice = {},
                                                      double level = default_significance_level)
{
    if (table.num_systems() < 2)
        throw DomainError("threshold_sweep needs at least 2 systems");
    auto const pair_table = select_pair(table, resolve_pair(table, choice));
    auto const profiles   = pair_profiles(pair_table, alpha, level);
    double const n_pairs  = static_cast<double>(profiles.size());

    std::vector<ThresholdSweepRow> rows;
    for (double t : grid)
    {
        ThresholdSweepRow row;
        row.t = t;
        std::size_t conc = 0, opp = 0, all_alpha = 0, f_pos = 0;
        for (auto const& p : profiles)
        {
            if (!(p.uir > t))
                continue;
            ++row.accepted;
            conc += p.category == ImprovementCategory::concordant_significant;
            opp += p.category == ImprovementCategory::opposite_significant;
            all_alpha += p.improves_all_alpha;
            f_pos += p.improves_f;
        }
        row.accepted_ratio = static_cast<double>(row.accepted) / n_pairs;
        row.empty_accepted = row.accepted == 0;
        if (!row.empty_accepted)
        {
            double const k       = static_cast<double>(row.accepted);
            row.concordant_ratio = static_cast<double>(conc) / k;
            row.opposite_ratio   = static_cast<double>(opp) / k;
            row.all_alpha_ratio  = static_cast<double>(all_alpha) / k;
            row.f_ratio          = static_cast<double>(f_pos) / k;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Cross-collection prediction

/// Ordered pairs whose mean F_α ordering holds strictly in every collection.
inline PairSet gold_consistent_pairs(std::vector<ScoreTable> const& tables, Alpha alpha,
                                     std::optional<MetricPairChoice> choice = {})
{
    if (tables.size() < 2)
        throw DomainError("gold_consistent_pairs needs at least 2 collections");
    std::set<std::string> const ids(tables.front().systems().begin(), tables.front().systems().end());
    std::vector<std::vector<double>> f; // per table, indexed like that table's systems
    for (auto const& t : tables)
    {
        if (std::set<std::string>(t.systems().begin(), t.systems().end()) != ids)
            throw DomainError("collection '" + t.collection_id() + "' has a different system set");
        f.push_back(mean_f_all(t, resolve_pair(t, choice), alpha));
    }

    PairSet out;
    for (auto const& a : ids)
        for (auto const& b : ids)
        {
            if (a == b)
                continue;
            bool all = true;
            for (std::size_t i = 0; i < tables.size() && all; ++i)
                all = f[i][tables[i].system_index(a)] > f[i][tables[i].system_index(b)];
            if (all)
                out.emplace(a, b);
        }
    return out;
}

enum class Predictor
{
    uir,
    f_delta,
    parametric_uir,
};

inline char const* to_string(Predictor p)
{
    switch (p)
    {
    case Predictor::uir: return "uir";
    case Predictor::f_delta: return "f_delta";
    case Predictor::parametric_uir: return "parametric_uir";
    }
    return "?";
}

struct PredictorPoint
{
    double t         = 0;
    double precision = 0;
    double recall    = 0;
    std::size_t predicted = 0; ///< |S_t|
    std::size_t correct   = 0; ///< |S_t ∩ T|
};

struct PredictorCurve
{
    Predictor predictor = Predictor::uir;
    std::vector<PredictorPoint> points; ///< thresholds with an empty prediction are omitted
};

/// Scores every ordered pair of the reference collection with one predictor.
inline std::vector<std::pair<OrderedPair, double>> predictor_scores(ScoreTable const& pair_table,
                                                                    Predictor predictor, Alpha alpha)
{
    std::vector<std::pair<OrderedPair, double>> out;
    auto const& ids = pair_table.systems();
    UirMatrix const m(pair_table);
    auto const f = mean_f_all(pair_table, {0, 1}, alpha);
    for (auto [a, b] : m.pairs())
    {
        double v = 0;
        switch (predictor)
        {
        case Predictor::uir: v = m.at(a, b).value; break;
        case Predictor::f_delta: v = f[a] - f[b]; break;
        case Predictor::parametric_uir: v = parametric_uir(pair_table, a, b); break;
        }
        out.emplace_back(OrderedPair{ids[a], ids[b]}, v);
    }
    return out;
}

/// Precision and recall of {pairs with predictor > t} on the reference
/// collection against the gold-consistent pairs of all collections. Recall is
/// reported as 0 when the gold-consistent set is empty.
inline std::vector<PredictorCurve> predictor_curves(ScoreTable const& reference,
                                                    std::vector<ScoreTable> const& all,
                                                    std::vector<double> const& grid, Alpha alpha,
                                                    std::optional<MetricPairChoice> choice = {})
{
    if (grid.empty())
        throw DomainError("predictor_curves: empty grid");
    bool const listed = std::any_of(all.begin(), all.end(), [&](ScoreTable const& t) {
        return t.collection_id() == reference.collection_id();
    });
    if (!listed)
        throw DomainError("reference collection '" + reference.collection_id() +
                          "' is not among the collections");

    auto const gold       = gold_consistent_pairs(all, alpha, choice);
    auto const pair_table = select_pair(reference, resolve_pair(reference, choice));

    std::vector<PredictorCurve> curves;
    for (auto predictor : {Predictor::uir, Predictor::f_delta, Predictor::parametric_uir})
    {
        auto const scores = predictor_scores(pair_table, predictor, alpha);
        PredictorCurve curve;
        curve.predictor = predictor;
        for (double t : grid)
        {
            PredictorPoint pt;
            pt.t = t;
            for (auto const& [pair, v] : scores)
            {
                if (!(v > t))
                    continue;
                ++pt.predicted;
                pt.correct += gold.count(pair);
            }
            if (pt.predicted == 0)
                continue;
            pt.precision = static_cast<double>(pt.correct) / static_cast<double>(pt.predicted);
            pt.recall    = gold.empty() ? 0.0
                                        : static_cast<double>(pt.correct) / static_cast<double>(gold.size());
            curve.points.push_back(pt);
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

} // namespace uir
