#pragma once

// Clusterings, gold standards and score tables, plus their on-disk formats.
//
// Clustering / gold file: one membership per line, `<label>\t<item>`.
// Lines starting with '#' and blank lines are skipped; CRLF is accepted.
//
// Score table: CSV with header `test_case,system,metric,score`. Fields are
// not quoted, so ids must not contain commas.

#include "uir/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace uir
{

using ItemId = std::string;

namespace detail
{

inline bool has_whitespace(std::string_view s)
{
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

inline std::string_view chomp_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    return line;
}

inline std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos)
        {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

/// Fixed-point text with `digits` decimals.
inline std::string format_fixed(double v, int digits)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
    return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view s)
{
    // from_chars rejects a leading '+', which spreadsheets sometimes emit.
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

} // namespace detail

struct ClusterTag {};
struct CategoryTag {};

/// A labelled family of non-empty item sets. Items may belong to several
/// groups. The tag keeps system output and gold standards from being mixed up
/// by accident; convert explicitly with `regroup`.
template <typename Tag>
class Grouping
{
public:
    using Members = std::set<ItemId>;
    using Map     = std::map<std::string, Members>;

    Grouping() = default;

    explicit Grouping(Map groups) : groups_(std::move(groups))
    {
        for (auto const& [label, members] : groups_)
        {
            if (label.empty())
                throw DomainError("empty group label");
            if (members.empty())
                throw DomainError("group '" + label + "' is empty");
            for (auto const& item : members)
            {
                if (item.empty() || detail::has_whitespace(item))
                    throw DomainError("invalid item id '" + item + "' in group '" + label + "'");
            }
            memberships_ += members.size();
        }
    }

    Map const& groups() const noexcept { return groups_; }
    auto begin() const noexcept { return groups_.begin(); }
    auto end() const noexcept { return groups_.end(); }
    std::size_t size() const noexcept { return groups_.size(); }
    bool empty() const noexcept { return groups_.empty(); }

    /// N: number of (group, item) memberships, the normaliser of the purity family.
    std::size_t memberships() const noexcept { return memberships_; }

    std::set<ItemId> items() const
    {
        std::set<ItemId> out;
        for (auto const& [label, members] : groups_)
            out.insert(members.begin(), members.end());
        return out;
    }

    bool has_overlap() const { return items().size() != memberships_; }

    friend bool operator==(Grouping const& a, Grouping const& b) { return a.groups_ == b.groups_; }

private:
    Map groups_;
    std::size_t memberships_ = 0;
};

using Clustering   = Grouping<ClusterTag>;
using GoldStandard = Grouping<CategoryTag>;

template <typename To, typename From>
Grouping<To> regroup(Grouping<From> const& g)
{
    return Grouping<To>(g.groups());
}

inline GoldStandard as_gold(Clustering const& c) { return regroup<CategoryTag>(c); }
inline Clustering as_clustering(GoldStandard const& g) { return regroup<ClusterTag>(g); }

template <typename Tag>
Grouping<Tag> parse_grouping(std::istream& in)
{
    typename Grouping<Tag>::Map groups;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw))
    {
        ++lineno;
        auto line = detail::chomp_cr(raw);
        if (line.empty() || line.front() == '#')
            continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 2)
            throw ParseError("expected 2 tab-separated fields, got " + std::to_string(fields.size()),
                             lineno);
        auto label = std::string(fields[0]);
        auto item  = std::string(fields[1]);
        if (label.empty())
            throw ParseError("empty cluster label", lineno);
        if (item.empty() || detail::has_whitespace(item))
            throw ParseError("invalid item id '" + item + "'", lineno);
        if (!groups[label].insert(item).second)
            throw ParseError("duplicate membership (" + label + ", " + item + ")", lineno);
    }
    if (groups.empty())
        throw ParseError("no clusters");
    return Grouping<Tag>(std::move(groups));
}

inline Clustering parse_clustering(std::istream& in) { return parse_grouping<ClusterTag>(in); }
inline GoldStandard parse_gold_standard(std::istream& in) { return parse_grouping<CategoryTag>(in); }

/// Canonical form: labels then items in lexicographic order, LF endings.
template <typename Tag>
void serialize_grouping(std::ostream& out, Grouping<Tag> const& g)
{
    for (auto const& [label, members] : g)
        for (auto const& item : members)
            out << label << '\t' << item << '\n';
}

// ---------------------------------------------------------------------------
// Validation of a (system, gold) pair

struct ValidationReport
{
    std::vector<ItemId> system_only; ///< clustered but absent from the gold standard
    std::vector<ItemId> gold_only;   ///< in the gold standard but never clustered

    bool empty() const noexcept { return system_only.empty() && gold_only.empty(); }

    std::vector<std::string> warnings() const
    {
        std::vector<std::string> out;
        auto plural = [](std::size_t n) { return n == 1 ? "" : "s"; };
        if (!gold_only.empty())
            out.push_back(std::to_string(gold_only.size()) + " gold item" + plural(gold_only.size()) +
                          " unclustered");
        if (!system_only.empty())
            out.push_back(std::to_string(system_only.size()) + " system item" +
                          plural(system_only.size()) + " absent from gold (scored as matching no category)");
        return out;
    }
};

/// Compares the item universes. In strict mode any mismatch throws; in lenient
/// mode the report is returned and out-of-gold items simply match no category.
inline ValidationReport validate_pair(Clustering const& system, GoldStandard const& gold, bool strict)
{
    auto sys_items  = system.items();
    auto gold_items = gold.items();

    ValidationReport report;
    std::set_difference(sys_items.begin(), sys_items.end(), gold_items.begin(), gold_items.end(),
                        std::back_inserter(report.system_only));
    std::set_difference(gold_items.begin(), gold_items.end(), sys_items.begin(), sys_items.end(),
                        std::back_inserter(report.gold_only));

    if (strict && !report.empty())
    {
        std::string msg = "item universes differ;";
        if (!report.system_only.empty())
        {
            msg += " not in gold:";
            for (auto const& i : report.system_only)
                msg += " " + i;
            msg += ";";
        }
        if (!report.gold_only.empty())
        {
            msg += " not clustered:";
            for (auto const& i : report.gold_only)
                msg += " " + i;
            msg += ";";
        }
        msg.pop_back();
        throw ValidationError(msg);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scores

using MetricNames = std::shared_ptr<const std::vector<std::string>>;

/// Named scores in [0,1] for one (system, test case) pair. The name list is
/// shared between all vectors of a table.
class MetricVector
{
public:
    MetricVector(MetricNames names, std::vector<double> values)
        : names_(std::move(names)), values_(std::move(values))
    {
        if (!names_ || names_->size() != values_.size())
            throw DomainError("metric vector: names and values differ in length");
        for (std::size_t i = 0; i < values_.size(); ++i)
        {
            if (!(values_[i] >= 0.0 && values_[i] <= 1.0))
                throw DomainError("metric '" + (*names_)[i] + "' = " +
                                  detail::format_double(values_[i]) + " outside [0,1]");
        }
    }

    MetricVector(std::vector<std::string> names, std::vector<double> values)
        : MetricVector(std::make_shared<const std::vector<std::string>>(std::move(names)),
                       std::move(values))
    {
    }

    std::size_t size() const noexcept { return values_.size(); }
    std::vector<std::string> const& names() const noexcept { return *names_; }
    MetricNames const& shared_names() const noexcept { return names_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_.at(i); }

    double at(std::string_view name) const
    {
        for (std::size_t i = 0; i < names_->size(); ++i)
            if ((*names_)[i] == name)
                return values_[i];
        throw DomainError("no metric named '" + std::string(name) + "'");
    }

    bool same_metrics(MetricVector const& other) const
    {
        return names_ == other.names_ || *names_ == *other.names_;
    }

private:
    MetricNames names_;
    std::vector<double> values_;
};

/// Dense test-case x system grid of metric vectors for one collection.
class ScoreTable
{
public:
    /// `values` is laid out case-major, then system, then metric.
    ScoreTable(std::string collection_id, std::vector<std::string> cases,
               std::vector<std::string> systems, std::vector<std::string> metrics,
               std::vector<double> const& values)
        : collection_(std::move(collection_id)),
          cases_(std::move(cases)),
          systems_(std::move(systems)),
          metrics_(std::make_shared<const std::vector<std::string>>(std::move(metrics)))
    {
        if (cases_.empty())
            throw DomainError("score table has no test cases");
        if (systems_.empty())
            throw DomainError("score table has no systems");
        if (metrics_->empty())
            throw DomainError("score table has no metrics");
        check_unique(cases_, "test case");
        check_unique(systems_, "system");
        check_unique(*metrics_, "metric");

        auto const m = metrics_->size();
        if (values.size() != cases_.size() * systems_.size() * m)
            throw DomainError("score table: expected " +
                              std::to_string(cases_.size() * systems_.size() * m) + " values, got " +
                              std::to_string(values.size()));
        cells_.reserve(cases_.size() * systems_.size());
        for (std::size_t k = 0; k < cases_.size() * systems_.size(); ++k)
            cells_.emplace_back(metrics_, std::vector<double>(values.begin() + k * m,
                                                              values.begin() + (k + 1) * m));
    }

    std::string const& collection_id() const noexcept { return collection_; }
    std::vector<std::string> const& cases() const noexcept { return cases_; }
    std::vector<std::string> const& systems() const noexcept { return systems_; }
    std::vector<std::string> const& metrics() const noexcept { return *metrics_; }
    std::size_t num_cases() const noexcept { return cases_.size(); }
    std::size_t num_systems() const noexcept { return systems_.size(); }
    std::size_t num_metrics() const noexcept { return metrics_->size(); }

    MetricVector const& cell(std::size_t test_case, std::size_t system) const
    {
        return cells_.at(test_case * systems_.size() + system);
    }

    MetricVector const& cell(std::string_view test_case, std::string_view system) const
    {
        return cell(index_of(cases_, test_case, "test case"), system_index(system));
    }

    std::size_t system_index(std::string_view id) const { return index_of(systems_, id, "system"); }
    std::size_t metric_index(std::string_view name) const { return index_of(*metrics_, name, "metric"); }
    bool has_system(std::string_view id) const
    {
        return std::find(systems_.begin(), systems_.end(), id) != systems_.end();
    }

    /// Scores of one system on one metric, in test-case order.
    std::vector<double> column(std::size_t system, std::size_t metric) const
    {
        std::vector<double> out;
        out.reserve(cases_.size());
        for (std::size_t c = 0; c < cases_.size(); ++c)
            out.push_back(cell(c, system)[metric]);
        return out;
    }

private:
    static void check_unique(std::vector<std::string> const& ids, char const* what)
    {
        std::set<std::string_view> seen;
        for (auto const& id : ids)
        {
            if (id.empty())
                throw DomainError(std::string("empty ") + what + " id");
            if (!seen.insert(id).second)
                throw DomainError(std::string("duplicate ") + what + " id '" + id + "'");
        }
    }

    static std::size_t index_of(std::vector<std::string> const& ids, std::string_view id, char const* what)
    {
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end())
            throw DomainError(std::string("unknown ") + what + " '" + std::string(id) + "'");
        return static_cast<std::size_t>(it - ids.begin());
    }

    std::string collection_;
    std::vector<std::string> cases_;
    std::vector<std::string> systems_;
    MetricNames metrics_;
    std::vector<MetricVector> cells_;
};

enum class ScoreScale
{
    fraction,
    percent,
};

inline constexpr std::string_view score_table_header = "test_case,system,metric,score";

/// Reads the long-form score CSV. Case, system and metric order is order of
/// first appearance.
inline ScoreTable parse_score_table(std::istream& in, std::string collection_id = {},
                                    ScoreScale scale = ScoreScale::fraction)
{
    std::string raw;
    std::size_t lineno = 0;
    bool have_header   = false;
    while (!have_header && std::getline(in, raw))
    {
        ++lineno;
        auto line = detail::chomp_cr(raw);
        if (line.empty())
            continue;
        if (line != score_table_header)
            throw ParseError("expected header '" + std::string(score_table_header) + "'", lineno);
        have_header = true;
    }
    if (!have_header)
        throw ParseError("empty score table");

    std::vector<std::string> cases, systems, metrics;
    std::unordered_map<std::string, std::size_t> case_idx, sys_idx, metric_idx;
    auto intern = [](std::string_view s, std::vector<std::string>& ids,
                     std::unordered_map<std::string, std::size_t>& index) {
        auto [it, inserted] = index.try_emplace(std::string(s), ids.size());
        if (inserted)
            ids.emplace_back(s);
        return it->second;
    };

    struct Entry
    {
        std::size_t c, s, m;
        double v;
        std::size_t line;
    };
    std::vector<Entry> entries;
    while (std::getline(in, raw))
    {
        ++lineno;
        auto line = detail::chomp_cr(raw);
        if (line.empty())
            continue;
        auto f = detail::split(line, ',');
        if (f.size() != 4)
            throw ParseError("expected 4 comma-separated fields, got " + std::to_string(f.size()), lineno);
        for (std::size_t i = 0; i < 3; ++i)
            if (f[i].empty())
                throw ParseError("empty id field", lineno);
        auto v = detail::parse_double(f[3]);
        if (!v)
            throw ParseError("invalid score '" + std::string(f[3]) + "'", lineno);
        double score = scale == ScoreScale::percent ? *v / 100.0 : *v;
        if (!(score >= 0.0 && score <= 1.0))
            throw ParseError("score " + std::string(f[3]) + " outside [0,1]" +
                                 (scale == ScoreScale::percent ? " after percent rescale" : ""),
                             lineno);
        entries.push_back({intern(f[0], cases, case_idx), intern(f[1], systems, sys_idx),
                           intern(f[2], metrics, metric_idx), score, lineno});
    }
    if (entries.empty())
        throw ParseError("score table has no rows");

    auto const nm = metrics.size(), ns = systems.size();
    std::vector<double> values(cases.size() * ns * nm, 0.0);
    std::vector<char> seen(values.size(), 0);
    for (auto const& e : entries)
    {
        auto k = (e.c * ns + e.s) * nm + e.m;
        if (seen[k])
            throw ParseError("duplicate score for (" + cases[e.c] + ", " + systems[e.s] + ", " +
                                 metrics[e.m] + ")",
                             e.line);
        seen[k]   = 1;
        values[k] = e.v;
    }
    for (std::size_t c = 0; c < cases.size(); ++c)
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t m = 0; m < nm; ++m)
                if (!seen[(c * ns + s) * nm + m])
                    throw ParseError("missing score for (" + cases[c] + ", " + systems[s] + ", " +
                                     metrics[m] + ")");

    return ScoreTable(std::move(collection_id), std::move(cases), std::move(systems),
                      std::move(metrics), values);
}

inline void serialize_score_table(std::ostream& out, ScoreTable const& table, bool header = true)
{
    if (header)
        out << score_table_header << '\n';
    for (std::size_t c = 0; c < table.num_cases(); ++c)
        for (std::size_t s = 0; s < table.num_systems(); ++s)
        {
            auto const& v = table.cell(c, s);
            for (std::size_t m = 0; m < table.num_metrics(); ++m)
                out << table.cases()[c] << ',' << table.systems()[s] << ',' << table.metrics()[m]
                    << ',' << detail::format_double(v[m]) << '\n';
        }
}

} // namespace uir
