#pragma once

// Unanimous improvement between metric vectors and the Unanimous Improvement
// Ratio (UIR) over a set of test cases.
//
// a >=∀ b on a test case iff a scores at least as high as b on every metric.
// UIR(a, b) = (|T_{a>=∀b}| - |T_{b>=∀a}|) / |T|. Cases where both directions
// hold (exact ties on every metric) are counted in both sets and cancel.
//
// The relation is not transitive once incomparable pairs are treated as ties,
// so nothing in here derives a total order from UIR.

#include "uir/data_model.hpp"
#include "uir/error.hpp"
#include "uir/metrics.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uir
{

enum class Relation
{
    a_over_b,
    b_over_a,
    equal,
    incomparable,
};

inline char const* to_string(Relation r)
{
    switch (r)
    {
    case Relation::a_over_b: return "a_over_b";
    case Relation::b_over_a: return "b_over_a";
    case Relation::equal: return "equal";
    case Relation::incomparable: return "incomparable";
    }
    return "?";
}

inline Relation relation_from(bool a_geq_b, bool b_geq_a)
{
    if (a_geq_b)
        return b_geq_a ? Relation::equal : Relation::a_over_b;
    return b_geq_a ? Relation::b_over_a : Relation::incomparable;
}

/// Exact comparison; no epsilon.
inline bool unanimously_geq(std::span<const double> a, std::span<const double> b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] >= b[i]))
            return false;
    return true;
}

inline Relation unanimous_compare(MetricVector const& qa, MetricVector const& qb)
{
    if (!qa.same_metrics(qb))
        throw DomainError("unanimous_compare: metric sets differ");
    return relation_from(unanimously_geq(qa.values(), qb.values()),
                         unanimously_geq(qb.values(), qa.values()));
}

struct UirResult
{
    std::size_t n_a_geq        = 0; ///< |T_{a>=∀b}|, ties included
    std::size_t n_b_geq        = 0; ///< |T_{b>=∀a}|, ties included
    std::size_t n_equal        = 0; ///< cases in both sets
    std::size_t n_incomparable = 0; ///< |T_{a||∀b}|
    std::size_t n_total        = 0;
    double value               = 0;
};

inline UirResult uir(ScoreTable const& table, std::size_t a, std::size_t b)
{
    if (a >= table.num_systems() || b >= table.num_systems())
        throw DomainError("uir: system index out of range");
    UirResult r;
    r.n_total = table.num_cases();
    for (std::size_t c = 0; c < table.num_cases(); ++c)
    {
        auto const qa = table.cell(c, a).values();
        auto const qb = table.cell(c, b).values();
        bool const ab = unanimously_geq(qa, qb);
        bool const ba = unanimously_geq(qb, qa);
        r.n_a_geq += ab;
        r.n_b_geq += ba;
        r.n_equal += ab && ba;
        r.n_incomparable += !ab && !ba;
    }
    // Negating the numerator is exact, so UIR(b, a) == -UIR(a, b) bit for bit.
    r.value = (static_cast<double>(r.n_a_geq) - static_cast<double>(r.n_b_geq)) /
              static_cast<double>(r.n_total);
    return r;
}

inline UirResult uir(ScoreTable const& table, std::string_view a, std::string_view b)
{
    return uir(table, table.system_index(a), table.system_index(b));
}

/// UIR for every ordered pair of systems of one table.
class UirMatrix
{
public:
    explicit UirMatrix(ScoreTable const& table)
        : systems_(table.systems()), n_(table.num_systems()), cells_(n_ * n_)
    {
        for (std::size_t a = 0; a < n_; ++a)
        {
            cells_[a * n_ + a] = uir(table, a, a);
            for (std::size_t b = a + 1; b < n_; ++b)
            {
                auto r = uir(table, a, b);
                auto s = r;
                std::swap(s.n_a_geq, s.n_b_geq);
                s.value = -r.value;
                cells_[a * n_ + b] = r;
                cells_[b * n_ + a] = s;
            }
        }
    }

    std::vector<std::string> const& systems() const noexcept { return systems_; }
    std::size_t size() const noexcept { return n_; }
    UirResult const& at(std::size_t a, std::size_t b) const { return cells_.at(a * n_ + b); }

    /// Ordered pairs (a, b), a != b, in row-major order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (a != b)
                    out.emplace_back(a, b);
        return out;
    }

private:
    std::vector<std::string> systems_;
    std::size_t n_;
    std::vector<UirResult> cells_;
};

inline UirMatrix pairwise_uir_matrix(ScoreTable const& table) { return UirMatrix(table); }

struct Reference
{
    std::string system;
    double uir = 0;
};

/// The system s maximising UIR(s, target), or none when that maximum does not
/// exceed `threshold`. Ties go to the lexicographically smallest id.
inline std::optional<Reference> reference_system(UirMatrix const& m, std::size_t target,
                                                 double threshold = 0.0)
{
    if (target >= m.size())
        throw DomainError("reference_system: system index out of range");
    std::optional<Reference> best;
    for (std::size_t s = 0; s < m.size(); ++s)
    {
        if (s == target)
            continue;
        double v          = m.at(s, target).value;
        auto const& id    = m.systems()[s];
        bool const better = !best || v > best->uir || (v == best->uir && id < best->system);
        if (better)
            best = Reference{id, v};
    }
    if (!best || !(best->uir > threshold))
        return std::nullopt;
    return best;
}

inline std::optional<Reference> reference_system(ScoreTable const& table, std::string_view system,
                                                 double threshold = 0.0)
{
    auto const target = table.system_index(system);
    return reference_system(UirMatrix(table), target, threshold);
}

using OrderedPair = std::pair<std::string, std::string>;
using PairSet     = std::set<OrderedPair>;

/// {(s1, s2) | UIR(s1, s2) > t}
inline PairSet robust_set_uir(UirMatrix const& m, double t)
{
    PairSet out;
    for (auto [a, b] : m.pairs())
        if (m.at(a, b).value > t)
            out.emplace(m.systems()[a], m.systems()[b]);
    return out;
}

inline PairSet robust_set_uir(ScoreTable const& table, double t) { return robust_set_uir(UirMatrix(table), t); }

/// {(s1, s2) | meanF(s1) - meanF(s2) > t}, F macro-averaged over test cases.
inline PairSet robust_set_f(ScoreTable const& table, double t, Alpha alpha, PairColumns cols)
{
    auto const f = mean_f_all(table, cols, alpha);
    PairSet out;
    for (std::size_t a = 0; a < f.size(); ++a)
        for (std::size_t b = 0; b < f.size(); ++b)
            if (a != b && f[a] - f[b] > t)
                out.emplace(table.systems()[a], table.systems()[b]);
    return out;
}

inline PairSet robust_set_f(ScoreTable const& table, double t, Alpha alpha)
{
    return robust_set_f(table, t, alpha, resolve_pair(table));
}

} // namespace uir
