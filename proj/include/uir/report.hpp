#pragma once

// Human- and machine-readable reports: the F ranking annotated with UIR, and
// the two-system comparison summary.

#include "uir/data_model.hpp"
#include "uir/metrics.hpp"
#include "uir/stats.hpp"
#include "uir/unanimous.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace uir
{

/// A reference UIR at or above this marks a system as dominated almost
/// unanimously (near-baseline behaviour).
inline constexpr double near_baseline_uir = 0.9;

struct RankingRow
{
    std::string system;
    double mean_f = 0;
    std::vector<std::string> improved; ///< systems this one improves with UIR > threshold, in ranking order
    std::optional<Reference> reference;
    bool near_baseline = false;
};

/// Systems sorted by mean F_α (descending, ties by id), each annotated with
/// the systems it robustly improves and its reference system. UIR only ever
/// annotates the F ranking; it is never used to order systems.
inline std::vector<RankingRow> render_ranking_report(ScoreTable const& table, Alpha alpha, double uir_threshold,
                                                     std::optional<MetricPairChoice> choice = {})
{
    auto const cols = resolve_pair(table, choice);
    auto const f    = mean_f_all(table, cols, alpha);
    UirMatrix const m(select_pair(table, cols));

    std::vector<std::size_t> order(table.num_systems());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (f[a] != f[b])
            return f[a] > f[b];
        return table.systems()[a] < table.systems()[b];
    });

    std::vector<RankingRow> rows;
    for (auto s : order)
    {
        RankingRow row;
        row.system = table.systems()[s];
        row.mean_f = f[s];
        for (auto o : order)
            if (o != s && m.at(s, o).value > uir_threshold)
                row.improved.push_back(table.systems()[o]);
        row.reference     = reference_system(m, s);
        row.near_baseline = row.reference && row.reference->uir >= near_baseline_uir;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_ranking_csv(std::ostream& out, std::vector<RankingRow> const& rows)
{
    out << "system,mean_f,improved_systems,reference_system,reference_uir\n";
    for (auto const& r : rows)
    {
        out << r.system << ',' << detail::format_fixed(r.mean_f, 4) << ',';
        for (std::size_t i = 0; i < r.improved.size(); ++i)
            out << (i ? " " : "") << r.improved[i];
        out << ',';
        if (r.reference)
            out << r.reference->system << ',' << detail::format_fixed(r.reference->uir, 4);
        else
            out << "-,-";
        out << '\n';
    }
}

struct ComparisonReport
{
    std::string a, b;
    UirResult uir;
    std::optional<ImprovementCategory> category; ///< only for two-metric tables
    std::optional<double> parametric;
};

inline ComparisonReport compare_systems(ScoreTable const& table, std::string const& a, std::string const& b,
                                        bool parametric, double level = default_significance_level)
{
    ComparisonReport r;
    r.a   = a;
    r.b   = b;
    r.uir = uir(table, a, b);
    if (table.num_metrics() == 2)
        r.category = categorize_improvement(table, a, b, level);
    if (parametric)
        r.parametric = parametric_uir(table, a, b);
    return r;
}

inline void write_comparison(std::ostream& out, ComparisonReport const& r)
{
    out << "systems: " << r.a << " vs " << r.b << '\n'
        << "test cases: " << r.uir.n_total << '\n'
        << r.a << " >= " << r.b << " on all metrics: " << r.uir.n_a_geq << '\n'
        << r.b << " >= " << r.a << " on all metrics: " << r.uir.n_b_geq << '\n'
        << "equal: " << r.uir.n_equal << '\n'
        << "incomparable: " << r.uir.n_incomparable << '\n'
        << "UIR = " << detail::format_double(r.uir.value) << '\n';
    if (r.parametric)
        out << "parametric UIR = " << detail::format_double(*r.parametric) << '\n';
    if (r.category)
        out << "significance: " << to_string(*r.category) << '\n';
}

} // namespace uir
