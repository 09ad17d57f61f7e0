#include "seer/cli/pipeline.hpp"

#include "seer/cli/csv.hpp"
#include "seer/cli/ingest.hpp"
#include "seer/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace seer::cli {

namespace fs = std::filesystem;

std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("SEER_OUT_DIR"); env && *env) return env;
    const fs::path p(cfg.output.empty() ? "seer_out" : cfg.output);
    return p.is_absolute() ? p.string() : (fs::path(cfg.base_dir) / p).lexically_normal().string();
}

RunOutcome execute(const RunRequest& req) {
    RunConfig cfg = load_config(req.config_path);
    if (req.seed) cfg.seed = req.seed;
    if (req.algorithm) {
        cfg.algorithm = *req.algorithm;
        if (cfg.algorithm == Algorithm::pls1 && cfg.dependent.variables.size() != 1)
            throw ConfigError("pls1 needs a dependent group with exactly one variable");
    }
    const CsvTable table = read_csv(cfg.resolved_dataset());
    PreparedModel pm = prepare_model(cfg, table);
    FitResult fit = run_algorithm(cfg, pm);
    const std::string dir = resolve_output_dir(cfg, req.out_dir);
    write_outputs(dir, cfg, pm, fit, req.outputs);
    return RunOutcome{dir, std::move(cfg), std::move(pm), std::move(fit)};
}

void print_summary(std::ostream& out, const RunOutcome& o) {
    const auto& mc = o.fit.components;
    out << to_string(o.fit.algorithm) << ": criterion " << fixed3(mc.criterion) << ", "
        << (mc.converged ? "converged" : "NOT converged") << " after " << mc.iterations << " iteration(s)\n";
    for (std::size_t r = 0; r < o.fit.predictors.size(); ++r)
        out << "  " << o.fit.predictors[r].name << ": " << mc.groups[r].size() << " component(s)\n";
    out << '\n';
    write_r2_table(out, o.prepared, o.fit);
    out << "\noutputs written to " << o.output_dir << '\n';
}

void print_report(std::ostream& out, const std::string& dir) {
    const fs::path root(dir);
    const auto summary = read_summary((root / "summary.tsv").string());
    for (const auto& [k, v] : summary) out << k << ": " << v << '\n';
    std::ifstream table(root / "r2_table.tsv");
    if (!table) throw ConfigError("cannot open '" + (root / "r2_table.tsv").string() + "'");
    out << '\n' << table.rdbuf();
}

} // namespace seer::cli
