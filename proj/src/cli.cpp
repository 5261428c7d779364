#include "grnlab/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "grnlab/config.hpp"
#include "grnlab/experiments.hpp"
#include "grnlab/io.hpp"

namespace grnlab {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string mode;
    std::string out_dir;
    std::string in_path;
};

RunConfig load(const Overrides& o)
{
    RunConfig c = o.config_path.empty() ? RunConfig{} : parse_config(o.config_path);
    if (o.seed) c.evolution.seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    if (!o.mode.empty()) c.evolution.mode = parse_evaluation_mode(o.mode);
    if (!o.out_dir.empty()) c.output_dir = o.out_dir;
    c.validate();
    return c;
}

json number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json summary(const std::vector<double>& xs)
{
    const auto m = mean_sd(xs);
    return {{"mean", number(m.mean)}, {"sd", number(m.sd)}};
}

json mw_json(const MannWhitneyResult& r) { return {{"U", r.u}, {"z", r.z}, {"p", r.p}}; }

json treatment_json(const TreatmentResult& r, const EvolutionConfig& cfg)
{
    std::vector<double> sel, edges;
    for (const auto& t : r.trials) {
        sel.push_back(t.selection_fitness);
        edges.push_back(t.edges);
    }
    return {{"mode", to_string(cfg.mode)},
            {"trials", r.trials.size()},
            {"fitness", summary(r.final_fitnesses())},
            {"fitness_as_evaluated", summary(sel)},
            {"qn", summary(r.final_qns())},
            {"best_edges", summary(edges)},
            {"population_mean_edges", summary(r.final_mean_edges())},
            {"median_fitness", summary(r.final_medians())}};
}

void write_treatment(const fs::path& dir, const TreatmentResult& r)
{
    write_file_atomic(dir / "generations.csv", generations_table(r).to_string());
    write_file_atomic(dir / "final.csv", final_table(r).to_string());
    write_file_atomic(dir / "best_grns.csv", best_grn_table(r).to_string());
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

QNormTable qnorm_for(const RunConfig& c, std::ostream& out)
{
    if (!c.qnorm_table.empty() && fs::exists(c.qnorm_table)) return QNormTable::load_csv(c.qnorm_table);
    const auto t0 = std::chrono::steady_clock::now();
    auto table = QNormTable::build(ModulePartition::halves(c.evolution.genes), c.qnorm_samples,
                                   splitmix64(c.evolution.seed ^ 0x51a7ab1eULL));
    if (!c.qnorm_table.empty()) table.save_csv(c.qnorm_table);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << "built Q normalisation table (" << c.qnorm_samples << " samples per edge count) in " << std::fixed
        << std::setprecision(2) << secs << " s\n";
    return table;
}

TreatmentSpec spec_for(const RunConfig& c, const QNormTable* qnorm)
{
    TreatmentSpec s;
    s.base = c.evolution;
    s.trials = c.trials;
    s.kind = c.experiment;
    s.qnorm = qnorm;
    return s;
}

int cmd_bound(std::ostream& out, const RunConfig& c)
{
    const auto b = upper_bound_breakdown(static_cast<int>(c.evolution.genes), c.evolution.perturbation_rate);
    out << "weight  perturbations  recoverable  unrecoverable  probability\n";
    for (const auto& row : b.rows)
        out << std::setw(6) << row.weight << std::setw(15) << row.perturbations << std::setw(13) << row.recoverable
            << std::setw(15) << row.unrecoverable << "  " << std::fixed << std::setprecision(6) << row.probability
            << '\n';
    out << "expected reward: " << std::setprecision(6) << b.expected_reward << '\n';
    out << "two-target fitness bound: " << std::setprecision(4) << b.fitness << '\n';
    return 0;
}

int cmd_treatment(std::ostream& out, RunConfig c)
{
    const auto qn = qnorm_for(c, out);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_treatment(spec_for(c, &qn));
    write_treatment(c.output_dir, r);
    auto j = treatment_json(r, c.evolution);
    j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_json(c.output_dir / "stats.json", j);
    out << "trials: " << r.trials.size() << "  mean final best fitness: " << std::setprecision(4) << std::fixed
        << j["fitness"]["mean"].get<double>() << '\n';
    return 0;
}

int cmd_edge_removal(std::ostream& out, RunConfig c)
{
    const auto qn = qnorm_for(c, out);
    const auto r = run_treatment(spec_for(c, &qn));
    write_treatment(c.output_dir, r);

    EdgeRemovalOptions opt;
    opt.stochastic = {c.evolution.samples, c.evolution.perturbation_rate, c.evolution.horizon};
    opt.repeats = c.stochastic_repeats;
    opt.seed = splitmix64(c.evolution.seed ^ 0xed6eULL);
    const auto study = edge_removal_study(r, c.evolution, opt);

    CsvTable removal;
    removal.header = {"trial", "inter_edges", "before_dist", "after_dist", "before_stoch", "after_stoch"};
    CsvTable paths;
    paths.header = {"trial", "removed", "fitness"};
    const BinomialTable table(static_cast<int>(c.evolution.genes), c.evolution.perturbation_rate);
    const auto partition = ModulePartition::halves(c.evolution.genes);
    for (std::size_t i = 0; i < study.per_grn.size(); ++i) {
        const auto& o = study.per_grn[i];
        removal.rows.push_back({std::to_string(i), std::to_string(o.inter_edges), format_double(o.before_dist),
                                format_double(o.after_dist), format_double(o.before_stoch),
                                format_double(o.after_stoch)});
        for (const auto& step :
             stepwise_edge_removal_path(r.trials[i].best, partition, two_target_set(), table, c.removal_order))
            paths.rows.push_back({std::to_string(i), std::to_string(step.removed), format_double(step.fitness)});
    }
    write_file_atomic(c.output_dir / "removal.csv", removal.to_string());
    write_file_atomic(c.output_dir / "removal_path.csv", paths.to_string());
    const double total = study.total;
    write_json(c.output_dir / "stats.json",
               {{"total", study.total},
                {"improved_distributional", study.improved_distributional},
                {"improved_stochastic", study.improved_stochastic},
                {"fraction_distributional", study.improved_distributional / total},
                {"fraction_stochastic", study.improved_stochastic / total},
                {"treatment", treatment_json(r, c.evolution)}});
    out << "improved (distributional): " << study.improved_distributional << "/" << study.total << '\n'
        << "improved (stochastic):     " << study.improved_stochastic << "/" << study.total << '\n';
    return 0;
}

json arm_json(const TreatmentResult& r, const EvolutionConfig& cfg, double bound)
{
    auto j = treatment_json(r, cfg);
    bool always = true;
    double lowest = 1.0;
    for (const auto& t : r.trials)
        for (const auto& rec : t.records) {
            lowest = std::min(lowest, rec.best.distributional_fitness);
            always = always && std::abs(rec.best.distributional_fitness - bound) < 1e-9;
        }
    j["best_always_at_bound"] = always;
    j["lowest_best_fitness"] = lowest;
    return j;
}

int cmd_optimal_start(std::ostream& out, RunConfig c)
{
    const auto qn = qnorm_for(c, out);
    const auto library = optimal_library(static_cast<std::size_t>(c.library_size), c.evolution.seed);
    const auto res = optimal_start_study(spec_for(c, &qn), library);
    write_treatment(c.output_dir / "selection", res.selection);
    write_treatment(c.output_dir / "no_selection", res.no_selection);
    write_json(c.output_dir / "stats.json", {{"bound", res.bound},
                                             {"library_size", library.size()},
                                             {"selection", arm_json(res.selection, c.evolution, res.bound)},
                                             {"no_selection", arm_json(res.no_selection, c.evolution, res.bound)},
                                             {"edges_test", mw_json(res.edges_test)}});
    out << "final mean edges: selection " << std::fixed << std::setprecision(2)
        << mean(res.selection.final_mean_edges()) << " vs none " << mean(res.no_selection.final_mean_edges())
        << "  (Mann-Whitney p = " << std::scientific << res.edges_test.p << ")\n";
    return 0;
}

int cmd_selection_compare(std::ostream& out, RunConfig c)
{
    const auto qn = qnorm_for(c, out);
    const auto res = selection_scheme_comparison(spec_for(c, &qn));
    auto cfg = c.evolution;
    cfg.crossover_rate = 0.0;
    write_treatment(c.output_dir / "tournament", res.tournament);
    write_treatment(c.output_dir / "proportional", res.proportional);
    write_json(c.output_dir / "stats.json", {{"tournament", treatment_json(res.tournament, cfg)},
                                             {"proportional", treatment_json(res.proportional, cfg)},
                                             {"median_test", mw_json(res.median_test)}});
    out << "final median fitness: tournament " << std::fixed << std::setprecision(4)
        << median(res.tournament.final_medians()) << " vs proportional " << median(res.proportional.final_medians())
        << '\n';
    return 0;
}

int cmd_qnorm_table(std::ostream& out, RunConfig c)
{
    const fs::path path = c.qnorm_table.empty() ? c.output_dir / "qnorm.csv" : c.qnorm_table;
    const auto table = QNormTable::build(ModulePartition::halves(c.evolution.genes), c.qnorm_samples,
                                         splitmix64(c.evolution.seed ^ 0x51a7ab1eULL));
    table.save_csv(path);
    out << "wrote " << table.entries().size() << " entries to " << path.string() << '\n';
    return 0;
}

int cmd_histogram(std::ostream& out, RunConfig c, const std::string& in_path)
{
    std::vector<double> fitness;
    if (!in_path.empty()) {
        const auto csv = CsvTable::parse(read_file(in_path));
        const auto col = csv.column("fitness");
        for (const auto& row : csv.rows) fitness.push_back(std::stod(row[col]));
    } else {
        const auto qn = qnorm_for(c, out);
        const auto r = run_treatment(spec_for(c, &qn));
        write_treatment(c.output_dir, r);
        fitness = r.final_fitnesses();
    }
    const auto h = ordered_fitness_histogram(fitness);
    CsvTable csv;
    csv.header = {"rank", "fitness", "plateau"};
    std::size_t rank = 0;
    json plateaus = json::array();
    for (std::size_t p = 0; p < h.plateaus.size(); ++p) {
        plateaus.push_back({{"level", h.plateaus[p].level}, {"count", h.plateaus[p].count}});
        for (int k = 0; k < h.plateaus[p].count; ++k, ++rank)
            csv.rows.push_back({std::to_string(rank), format_double(h.sorted[rank]), std::to_string(p)});
    }
    write_file_atomic(c.output_dir / "histogram.csv", csv.to_string());
    write_json(c.output_dir / "stats.json", {{"runs", h.sorted.size()}, {"plateaus", plateaus}});
    out << h.sorted.size() << " runs, " << h.plateaus.size() << " plateaus\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Distributional and sampled fitness evaluation of evolving gene regulatory networks", "grnlab"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--trials", o.trials, "independent runs");
        sub->add_option("--mode", o.mode, "fitness used for selection")->check(CLI::IsMember({"dist", "stoch"}));
        sub->add_option("--out", o.out_dir, "output directory");
    };
    auto* evolve = app.add_subcommand("evolve", "one two-phase run");
    auto* treatment = app.add_subcommand("treatment", "independent two-phase runs");
    auto* bound = app.add_subcommand("bound", "two-target fitness bound and its per-weight breakdown");
    auto* removal = app.add_subcommand("edge-removal", "inter-module edge removal study");
    auto* optimal = app.add_subcommand("optimal-start", "maintenance of an optimal population, selection vs none");
    auto* selection = app.add_subcommand("selection-compare", "tournament vs proportional selection, no crossover");
    auto* qnorm = app.add_subcommand("qnorm-table", "sample the random-network Q table");
    auto* histogram = app.add_subcommand("histogram", "ordered histogram of final best fitnesses");
    for (auto* sub : {evolve, treatment, bound, removal, optimal, selection, qnorm, histogram}) add_common(sub);
    histogram->add_option("--in", o.in_path, "final.csv of a finished treatment")->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        RunConfig c = load(o);
        if (*bound) return cmd_bound(out, c);
        if (*evolve) {
            c.trials = 1;
            return cmd_treatment(out, c);
        }
        if (*treatment) return cmd_treatment(out, c);
        if (*removal) {
            c.evolution.mode = EvaluationMode::distributional;
            return cmd_edge_removal(out, c);
        }
        if (*optimal) {
            // Optimal-population runs use full crossover unless configured.
            if (!c.explicit_keys.count("crossover_rate")) c.evolution.crossover_rate = 1.0;
            return cmd_optimal_start(out, c);
        }
        if (*selection) return cmd_selection_compare(out, c);
        if (*qnorm) return cmd_qnorm_table(out, c);
        if (*histogram) return cmd_histogram(out, c, o.in_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace grnlab
