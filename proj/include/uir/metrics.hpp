#pragma once

// Extrinsic clustering metrics, the F combiner and the trivial baselines.

#include "uir/data_model.hpp"
#include "uir/error.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace uir
{

/// Relative weight of the precision-like metric in F, in [0,1].
class Alpha
{
public:
    explicit Alpha(double value) : value_(value)
    {
        if (!(value >= 0.0 && value <= 1.0))
            throw DomainError("alpha " + detail::format_double(value) + " outside [0,1]");
    }
    double value() const noexcept { return value_; }

    friend bool operator==(Alpha, Alpha) = default;

private:
    double value_;
};

enum class MetricPairChoice
{
    purity_ip,
    bcubed,
};

/// Metric names of a (precision-like, recall-like) pair as written to score tables.
struct MetricPair
{
    std::string precision;
    std::string recall;
};

inline MetricPair metric_names(MetricPairChoice choice)
{
    switch (choice)
    {
    case MetricPairChoice::purity_ip: return {"purity", "inverse_purity"};
    case MetricPairChoice::bcubed: return {"bcubed_precision", "bcubed_recall"};
    }
    throw DomainError("unknown metric pair");
}

inline MetricPairChoice parse_metric_pair_choice(std::string_view s)
{
    if (s == "purity_ip")
        return MetricPairChoice::purity_ip;
    if (s == "bcubed")
        return MetricPairChoice::bcubed;
    throw DomainError("unknown metric pair '" + std::string(s) + "' (expected purity_ip or bcubed)");
}

/// |cluster ∩ category| / |cluster|.
inline double cluster_precision(std::set<ItemId> const& cluster, std::set<ItemId> const& category)
{
    if (cluster.empty())
        throw DomainError("cluster_precision: empty cluster");
    std::size_t common = 0;
    auto a = cluster.begin();
    auto b = category.begin();
    while (a != cluster.end() && b != category.end())
    {
        if (*a < *b)
            ++a;
        else if (*b < *a)
            ++b;
        else
        {
            ++common;
            ++a;
            ++b;
        }
    }
    return static_cast<double>(common) / static_cast<double>(cluster.size());
}

namespace detail
{

// Σ_i max_j |A_i ∩ B_j| / N_A. Items of A missing from B count towards no
// B-group. Accumulation is integral, so the result does not depend on
// summation order.
template <typename TagA, typename TagB>
double weighted_max_precision(Grouping<TagA> const& outer, Grouping<TagB> const& inner)
{
    std::unordered_map<std::string_view, std::vector<std::size_t>> groups_of;
    std::size_t idx = 0;
    for (auto const& [label, members] : inner)
    {
        for (auto const& item : members)
            groups_of[item].push_back(idx);
        ++idx;
    }

    std::vector<std::size_t> hits(inner.size(), 0);
    std::size_t total = 0;
    for (auto const& [label, members] : outer)
    {
        std::fill(hits.begin(), hits.end(), 0);
        std::size_t best = 0;
        for (auto const& item : members)
        {
            auto it = groups_of.find(item);
            if (it == groups_of.end())
                continue;
            for (auto g : it->second)
                best = std::max(best, ++hits[g]);
        }
        total += best;
    }
    return static_cast<double>(total) / static_cast<double>(outer.memberships());
}

} // namespace detail

/// Cluster-weighted average of each cluster's best precision against any
/// category. Maximal (1) for all-singleton output.
inline double purity(Clustering const& system, GoldStandard const& gold)
{
    if (system.empty())
        throw DomainError("purity: empty clustering");
    return detail::weighted_max_precision(system, gold);
}

/// Category-weighted average of each category's best coverage by any cluster.
/// Maximal (1) for the all-in-one clustering.
inline double inverse_purity(Clustering const& system, GoldStandard const& gold)
{
    if (gold.empty())
        throw DomainError("inverse_purity: empty gold standard");
    return detail::weighted_max_precision(gold, system);
}

struct BCubed
{
    double precision = 0;
    double recall    = 0;
};

/// Single-assignment BCubed. Overlapping inputs are refused. Gold items the
/// system never clustered get recall 0; system items outside the gold standard
/// are a validation error.
inline BCubed bcubed(Clustering const& system, GoldStandard const& gold)
{
    if (system.empty() || gold.empty())
        throw DomainError("bcubed: empty clustering or gold standard");
    if (system.has_overlap() || gold.has_overlap())
        throw DomainError("overlap unsupported for bcubed; use purity_ip");

    std::unordered_map<std::string_view, std::string_view> category_of;
    for (auto const& [label, members] : gold)
        for (auto const& item : members)
            category_of[item] = label;

    // |cluster ∩ category| per (cluster, category) pair.
    std::map<std::pair<std::string_view, std::string_view>, std::size_t> joint;
    std::unordered_map<std::string_view, std::string_view> cluster_of;
    for (auto const& [label, members] : system)
        for (auto const& item : members)
        {
            auto it = category_of.find(item);
            if (it == category_of.end())
                throw ValidationError("bcubed: item '" + item + "' is not in the gold standard");
            cluster_of[item] = label;
            ++joint[{label, it->second}];
        }

    BCubed out;
    double sum = 0;
    for (auto const& [label, members] : system)
        for (auto const& item : members)
            sum += static_cast<double>(joint[{label, category_of[item]}]) /
                   static_cast<double>(members.size());
    out.precision = sum / static_cast<double>(system.memberships());

    sum = 0;
    for (auto const& [label, members] : gold)
        for (auto const& item : members)
        {
            auto it = cluster_of.find(item);
            if (it == cluster_of.end())
                continue;
            sum += static_cast<double>(joint[{it->second, label}]) / static_cast<double>(members.size());
        }
    out.recall = sum / static_cast<double>(gold.memberships());
    return out;
}

inline double bcubed_precision(Clustering const& system, GoldStandard const& gold)
{
    return bcubed(system, gold).precision;
}

inline double bcubed_recall(Clustering const& system, GoldStandard const& gold)
{
    return bcubed(system, gold).recall;
}

/// Weighted harmonic mean 1 / (α/p + (1-α)/r). Total on [0,1]²: α = 0 gives r,
/// α = 1 gives p, and a zero component with non-zero weight gives 0.
inline double f_measure(double p, double r, Alpha alpha)
{
    if (!(p >= 0.0 && p <= 1.0) || !(r >= 0.0 && r <= 1.0))
        throw DomainError("f_measure: components must lie in [0,1]");
    double const a = alpha.value();
    if (a == 0.0)
        return r;
    if (a == 1.0)
        return p;
    if (p == 0.0 || r == 0.0)
        return 0.0;
    return 1.0 / (a / p + (1.0 - a) / r);
}

/// Scores a system output on the chosen pair, as (name, value) in
/// precision-like, recall-like order.
inline std::array<std::pair<std::string, double>, 2> evaluate(Clustering const& system,
                                                              GoldStandard const& gold,
                                                              MetricPairChoice choice)
{
    auto names = metric_names(choice);
    if (choice == MetricPairChoice::purity_ip)
        return {{{names.precision, purity(system, gold)}, {names.recall, inverse_purity(system, gold)}}};
    auto b = bcubed(system, gold);
    return {{{names.precision, b.precision}, {names.recall, b.recall}}};
}

// ---------------------------------------------------------------------------
// Baselines

inline constexpr std::string_view all_in_one_label = "all";
inline constexpr std::string_view singleton_prefix = "singleton:";

/// B1: every item in its own cluster.
inline Clustering baseline_one_in_one(std::set<ItemId> const& items)
{
    if (items.empty())
        throw DomainError("baseline: empty item set");
    Clustering::Map groups;
    for (auto const& item : items)
        groups.emplace(std::string(singleton_prefix) + item, Clustering::Members{item});
    return Clustering(std::move(groups));
}

/// B100: a single cluster holding every item.
inline Clustering baseline_all_in_one(std::set<ItemId> const& items)
{
    if (items.empty())
        throw DomainError("baseline: empty item set");
    return Clustering(Clustering::Map{{std::string(all_in_one_label), items}});
}

/// B_COMB: the union of B1 and B100, overlapping by construction.
inline Clustering baseline_combined(std::set<ItemId> const& items)
{
    auto groups = baseline_one_in_one(items).groups();
    groups.emplace(std::string(all_in_one_label), items);
    return Clustering(std::move(groups));
}

// ---------------------------------------------------------------------------
// F over score tables

/// Column indices of the (precision-like, recall-like) pair inside a table.
struct PairColumns
{
    std::size_t precision = 0;
    std::size_t recall    = 1;
};

/// With an explicit choice the named columns are looked up. Without one the
/// table must hold exactly two metrics, taken in order of appearance.
inline PairColumns resolve_pair(ScoreTable const& table, std::optional<MetricPairChoice> choice = {})
{
    if (choice)
    {
        auto names = metric_names(*choice);
        return {table.metric_index(names.precision), table.metric_index(names.recall)};
    }
    if (table.num_metrics() != 2)
        throw DomainError("table has " + std::to_string(table.num_metrics()) +
                          " metrics; choose a metric pair explicitly");
    return {0, 1};
}

/// Copy of the table restricted to the two columns of a pair, in
/// (precision-like, recall-like) order.
inline ScoreTable select_pair(ScoreTable const& table, PairColumns cols)
{
    std::vector<double> values;
    values.reserve(table.num_cases() * table.num_systems() * 2);
    for (std::size_t c = 0; c < table.num_cases(); ++c)
        for (std::size_t s = 0; s < table.num_systems(); ++s)
        {
            auto const& v = table.cell(c, s);
            values.push_back(v[cols.precision]);
            values.push_back(v[cols.recall]);
        }
    return ScoreTable(table.collection_id(), table.cases(), table.systems(),
                      {table.metrics()[cols.precision], table.metrics()[cols.recall]}, values);
}

/// Macro-averaged F over the test cases of one system.
inline double mean_f(ScoreTable const& table, std::size_t system, PairColumns cols, Alpha alpha)
{
    double sum = 0;
    for (std::size_t c = 0; c < table.num_cases(); ++c)
    {
        auto const& v = table.cell(c, system);
        sum += f_measure(v[cols.precision], v[cols.recall], alpha);
    }
    return sum / static_cast<double>(table.num_cases());
}

inline std::vector<double> mean_f_all(ScoreTable const& table, PairColumns cols, Alpha alpha)
{
    std::vector<double> out;
    out.reserve(table.num_systems());
    for (std::size_t s = 0; s < table.num_systems(); ++s)
        out.push_back(mean_f(table, s, cols, alpha));
    return out;
}

} // namespace uir
