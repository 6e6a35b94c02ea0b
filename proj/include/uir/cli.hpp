#pragma once

// Command-line front end. `run` is the whole program minus `main`, so tests can
// drive it with in-memory streams.
//
// Exit codes: 0 success, 1 evaluation error (`error: <category>: <detail>` on
// stderr), 2 usage error.

#include "uir/data_model.hpp"
#include "uir/error.hpp"
#include "uir/experiments.hpp"
#include "uir/metrics.hpp"
#include "uir/report.hpp"
#include "uir/stats.hpp"
#include "uir/unanimous.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace uir::cli
{

enum class Subcommand
{
    eval,
    compare,
    rank,
    alpha_sweep,
    threshold_sweep,
    predict,
};

struct RunConfig
{
    Subcommand subcommand     = Subcommand::eval;
    double alpha              = 0.5;
    double uir_threshold      = 0.25;
    double significance_level = default_significance_level;
    std::optional<MetricPairChoice> metric_pair;
    bool strict     = false;
    bool percent    = false;
    bool parametric = false;
    bool no_header  = false;

    std::vector<std::string> system_files;
    std::string gold_file;
    std::string test_case;
    std::string scores_file;
    std::string system_a, system_b;
    std::string grid;
    std::string reference_file;
    std::vector<std::string> collection_files;
    std::vector<std::string> systems;
    std::string output; ///< empty: stdout
};

namespace detail
{

inline std::ifstream open_input(std::string const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    return in;
}

template <typename Tag>
Grouping<Tag> read_grouping(std::string const& path)
{
    auto in = open_input(path);
    try
    {
        return parse_grouping<Tag>(in);
    }
    catch (ParseError const& e)
    {
        throw ParseError(path + ": " + e.what());
    }
}

inline ScoreTable read_scores(std::string const& path, bool percent)
{
    auto in = open_input(path);
    try
    {
        return parse_score_table(in, path, percent ? ScoreScale::percent : ScoreScale::fraction);
    }
    catch (ParseError const& e)
    {
        throw ParseError(path + ": " + e.what());
    }
}

inline std::string stem(std::string const& path) { return std::filesystem::path(path).stem().string(); }

inline void run_eval(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    auto const gold  = read_grouping<CategoryTag>(cfg.gold_file);
    auto const tcase = cfg.test_case.empty() ? stem(cfg.gold_file) : cfg.test_case;
    auto const choice = cfg.metric_pair.value_or(MetricPairChoice::purity_ip);
    if (!cfg.no_header)
        out << score_table_header << '\n';
    for (auto const& file : cfg.system_files)
    {
        auto const system = read_grouping<ClusterTag>(file);
        auto const report = validate_pair(system, gold, cfg.strict);
        for (auto const& w : report.warnings())
            err << "warning: " << file << ": " << w << '\n';
        for (auto const& [metric, value] : evaluate(system, gold, choice))
            out << tcase << ',' << stem(file) << ',' << metric << ',' << uir::detail::format_double(value)
                << '\n';
    }
}

inline void run_compare(RunConfig const& cfg, std::ostream& out)
{
    auto const table = read_scores(cfg.scores_file, cfg.percent);
    write_comparison(out, compare_systems(table, cfg.system_a, cfg.system_b, cfg.parametric,
                                          cfg.significance_level));
}

inline void run_rank(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    auto const table = read_scores(cfg.scores_file, cfg.percent);
    auto const rows  = render_ranking_report(table, Alpha(cfg.alpha), cfg.uir_threshold, cfg.metric_pair);
    for (auto const& r : rows)
        if (r.near_baseline)
            err << "warning: " << r.system << " is dominated near-unanimously by " << r.reference->system
                << " (UIR " << uir::detail::format_fixed(r.reference->uir, 4) << ")\n";
    write_ranking_csv(out, rows);
}

inline void run_alpha_sweep(RunConfig const& cfg, std::ostream& out)
{
    auto const table = read_scores(cfg.scores_file, cfg.percent);
    auto const sweep = alpha_sweep(table, cfg.systems, parse_grid(cfg.grid), resolve_pair(table, cfg.metric_pair));
    out << "system,alpha,mean_f\n";
    for (std::size_t s = 0; s < sweep.systems.size(); ++s)
        for (std::size_t i = 0; i < sweep.alphas.size(); ++i)
            out << sweep.systems[s] << ',' << uir::detail::format_double(sweep.alphas[i]) << ','
                << uir::detail::format_double(sweep.curves[s][i]) << '\n';
}

inline void run_threshold_sweep(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    auto const table = read_scores(cfg.scores_file, cfg.percent);
    auto const rows  = threshold_sweep(table, parse_grid(cfg.grid), Alpha(cfg.alpha), cfg.metric_pair,
                                       cfg.significance_level);
    out << "t,accepted_ratio,concordant_ratio,opposite_ratio,all_alpha_ratio,f_ratio,accepted_pairs\n";
    std::size_t empty = 0;
    for (auto const& r : rows)
    {
        using uir::detail::format_double;
        out << format_double(r.t) << ',' << format_double(r.accepted_ratio) << ','
            << format_double(r.concordant_ratio) << ',' << format_double(r.opposite_ratio) << ','
            << format_double(r.all_alpha_ratio) << ',' << format_double(r.f_ratio) << ',' << r.accepted
            << '\n';
        empty += r.empty_accepted;
    }
    if (empty)
        err << "warning: " << empty << " threshold(s) accept no pair; their conditioned ratios are reported as 0\n";
}

inline void run_predict(RunConfig const& cfg, std::ostream& out)
{
    std::vector<ScoreTable> all;
    std::optional<std::size_t> ref;
    for (auto const& f : cfg.collection_files)
    {
        if (f == cfg.reference_file)
            ref = all.size();
        all.push_back(read_scores(f, cfg.percent));
    }
    if (!ref)
    {
        ref = all.size();
        all.push_back(read_scores(cfg.reference_file, cfg.percent));
    }
    auto const curves = predictor_curves(all[*ref], all, parse_grid(cfg.grid), Alpha(cfg.alpha), cfg.metric_pair);
    out << "predictor,t,precision,recall\n";
    for (auto const& c : curves)
        for (auto const& p : c.points)
            out << to_string(c.predictor) << ',' << uir::detail::format_double(p.t) << ','
                << uir::detail::format_double(p.precision) << ',' << uir::detail::format_double(p.recall)
                << '\n';
}

inline void dispatch(RunConfig const& cfg, std::ostream& out, std::ostream& err)
{
    switch (cfg.subcommand)
    {
    case Subcommand::eval: run_eval(cfg, out, err); break;
    case Subcommand::compare: run_compare(cfg, out); break;
    case Subcommand::rank: run_rank(cfg, out, err); break;
    case Subcommand::alpha_sweep: run_alpha_sweep(cfg, out); break;
    case Subcommand::threshold_sweep: run_threshold_sweep(cfg, out, err); break;
    case Subcommand::predict: run_predict(cfg, out); break;
    }
}

} // namespace detail

inline int run(int argc, char const* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    RunConfig cfg;
    std::string metrics;

    CLI::App app{"Clustering evaluation with Purity/BCubed, F and the Unanimous Improvement Ratio", "uir"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--output,-o", cfg.output, "Write results to this file instead of stdout");
    };
    auto add_scores = [&](CLI::App* sub) {
        sub->add_option("--scores", cfg.scores_file, "Score table CSV (test_case,system,metric,score)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_flag("--percent", cfg.percent, "Scores are percentages; divide by 100 on ingest");
    };
    auto add_metrics = [&](CLI::App* sub) {
        sub->add_option("--metrics", metrics, "Metric pair: purity_ip or bcubed")
            ->check(CLI::IsMember({"purity_ip", "bcubed"}));
    };
    auto add_alpha = [&](CLI::App* sub) {
        sub->add_option("--alpha", cfg.alpha, "Weight of the precision-like metric in F")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    };
    auto add_level = [&](CLI::App* sub) {
        sub->add_option("--significance-level", cfg.significance_level, "Wilcoxon significance level")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
    };

    auto* eval = app.add_subcommand("eval", "Score system clusterings against a gold standard");
    eval->add_option("--system", cfg.system_files, "System clustering TSV (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--gold", cfg.gold_file, "Gold standard TSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--test-case", cfg.test_case, "Test case id (default: gold file stem)");
    eval->add_flag("--strict", cfg.strict, "Fail when system and gold items differ");
    eval->add_flag("--no-header", cfg.no_header, "Omit the CSV header");
    add_metrics(eval);
    add_output(eval);

    auto* compare = app.add_subcommand("compare", "UIR between two systems");
    add_scores(compare);
    compare->add_option("--a", cfg.system_a, "First system")->required();
    compare->add_option("--b", cfg.system_b, "Second system")->required();
    compare->add_flag("--parametric", cfg.parametric, "Also report the parametric UIR");
    add_level(compare);
    add_output(compare);

    auto* rank = app.add_subcommand("rank", "F ranking annotated with UIR");
    add_scores(rank);
    add_alpha(rank);
    rank->add_option("--uir-threshold", cfg.uir_threshold, "UIR above which an improvement is listed")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    add_metrics(rank);
    add_output(rank);

    auto* asweep = app.add_subcommand("alpha-sweep", "Mean F of every system over a grid of alpha values");
    add_scores(asweep);
    cfg.grid = "0:1:0.01";
    asweep->add_option("--grid", cfg.grid, "start:stop:step")->capture_default_str();
    asweep->add_option("--systems", cfg.systems, "Restrict to these systems");
    add_metrics(asweep);
    add_output(asweep);

    auto* tsweep = app.add_subcommand("threshold-sweep", "Statistics of the pairs accepted at each UIR threshold");
    add_scores(tsweep);
    std::string tgrid = "-1:1:0.05";
    tsweep->add_option("--grid", tgrid, "start:stop:step")->capture_default_str();
    add_alpha(tsweep);
    add_metrics(tsweep);
    add_level(tsweep);
    add_output(tsweep);

    auto* predict = app.add_subcommand("predict", "UIR, F and parametric UIR as predictors of cross-collection agreement");
    predict->add_option("--reference", cfg.reference_file, "Reference collection score table")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_option("--collections", cfg.collection_files, "All collections' score tables")
        ->required()
        ->check(CLI::ExistingFile);
    predict->add_flag("--percent", cfg.percent, "Scores are percentages; divide by 100 on ingest");
    std::string pgrid = "0:1:0.025";
    predict->add_option("--grid", pgrid, "start:stop:step")->capture_default_str();
    add_alpha(predict);
    add_metrics(predict);
    add_output(predict);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        return 0;
    }
    catch (CLI::CallForAllHelp const&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    }
    catch (CLI::ParseError const& e)
    {
        err << e.what() << "\n\n" << app.help();
        return 2;
    }

    if (*eval)
        cfg.subcommand = Subcommand::eval;
    else if (*compare)
        cfg.subcommand = Subcommand::compare;
    else if (*rank)
        cfg.subcommand = Subcommand::rank;
    else if (*asweep)
        cfg.subcommand = Subcommand::alpha_sweep;
    else if (*tsweep)
    {
        cfg.subcommand = Subcommand::threshold_sweep;
        cfg.grid       = tgrid;
    }
    else
    {
        cfg.subcommand = Subcommand::predict;
        cfg.grid       = pgrid;
    }

    try
    {
        if (!metrics.empty())
            cfg.metric_pair = parse_metric_pair_choice(metrics);
        // fail on a malformed grid before reading any input
        if (cfg.subcommand == Subcommand::alpha_sweep || cfg.subcommand == Subcommand::threshold_sweep ||
            cfg.subcommand == Subcommand::predict)
            parse_grid(cfg.grid);

        // Buffer so a failing run leaves no partial output file behind.
        std::ostringstream buffer;
        detail::dispatch(cfg, buffer, err);
        if (cfg.output.empty())
            out << buffer.str();
        else
        {
            std::ofstream file(cfg.output, std::ios::binary);
            if (!file || !(file << buffer.str()))
                throw IoError("cannot write '" + cfg.output + "'");
        }
    }
    catch (Error const& e)
    {
        err << "error: " << e.category() << ": " << e.what() << '\n';
        return 1;
    }
    catch (std::exception const& e)
    {
        err << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace uir::cli
