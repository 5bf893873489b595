// Command-line front end: block extraction, fitting, return levels,
// diagnostics, influence curves and the simulation study.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gevmiss/cli_io.hpp"
#include "gevmiss/errors.hpp"

namespace fs = std::filesystem;
using namespace gevmiss;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

// Runs `write` against the file at `path`, or stdout when the path is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  auto out = open_output(path);
  write(out);
  if (!out) throw IoError("write failed: " + path);
}

void dump_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

FitResult fit_or_throw(const LogLikelihood& objective) {
  FitResult f = fit(objective);
  if (!f.converged) throw DomainError("fit did not converge: " + f.message);
  return f;
}

struct BlockmaxArgs {
  std::string input;
  std::string scheme = "calendar_year";
  std::int64_t length = 365;
  std::int64_t min_obs = 1;
  std::string output;
  std::string report;
};

void run_blockmax(const BlockmaxArgs& a) {
  const BlockSpec spec{parse_block_scheme(a.scheme), a.length, a.min_obs};
  const auto extraction = extract_block_maxima(read_series(a.input), spec);
  emit(a.output, [&](std::ostream& out) { write_blocks_csv(out, extraction.blocks); });
  const auto report = missingness_to_json(missingness_report(extraction));
  if (a.report.empty()) {
    dump_json(std::cerr, report);
  } else {
    emit(a.report, [&](std::ostream& out) { dump_json(out, report); });
  }
}

struct FitArgs {
  std::string blocks;
  std::string estimator = "adjust";
  double discard_threshold = 0.10;
  std::string output;
};

void run_fit(const FitArgs& a) {
  const LogLikelihood objective(read_blocks_csv(a.blocks), parse_estimator(a.estimator),
                                a.discard_threshold);
  FitOptions options;
  options.discard_threshold = a.discard_threshold;
  const auto f = fit(objective, options);
  emit(a.output, [&](std::ostream& out) { dump_json(out, fit_to_json(f)); });
}

struct RlArgs {
  FitArgs fit;
  std::string periods = "100";
  double level = 0.95;
  std::string method = "profile";
};

void run_rl(const RlArgs& a) {
  const LogLikelihood objective(read_blocks_csv(a.fit.blocks), parse_estimator(a.fit.estimator),
                                a.fit.discard_threshold);
  const auto method = parse_interval_method(a.method);
  const auto periods = parse_real_list(a.periods);
  const auto f = fit_or_throw(objective);
  std::vector<ReturnLevelEstimate> rows;
  for (double r : periods) rows.push_back(return_level_interval(objective, f, r, a.level, method));
  emit(a.fit.output, [&](std::ostream& out) { write_return_levels_csv(out, rows); });
}

struct DiagnoseArgs {
  FitArgs fit;
  std::string out_dir = ".";
  std::size_t bins = 0;
};

void run_diagnose(const DiagnoseArgs& a) {
  const auto estimator = parse_estimator(a.fit.estimator);
  const LogLikelihood objective(read_blocks_csv(a.fit.blocks), estimator,
                                a.fit.discard_threshold);
  const auto f = fit_or_throw(objective);
  // The discard fit describes only the retained blocks.
  const auto& data = objective.data();
  const std::size_t bins = a.bins == 0 ? default_bin_count(data.size()) : a.bins;
  const auto bundle = diagnostics(data, f, default_rl_grid(), bins, a.fit.discard_threshold);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  emit((dir / "pp.csv").string(), [&](std::ostream& out) { write_pp_csv(out, bundle.pp); });
  emit((dir / "qq.csv").string(), [&](std::ostream& out) { write_qq_csv(out, bundle.qq); });
  emit((dir / "rl_plot.csv").string(),
       [&](std::ostream& out) { write_rl_plot_csv(out, bundle.rl); });
  emit((dir / "density.csv").string(),
       [&](std::ostream& out) { write_density_csv(out, bundle.density); });
}

struct InfluenceArgs {
  std::string params;
  std::string periods;
  std::string grid = "-4:4:201";
  std::size_t draws = InformationOptions{}.draws;
  std::uint64_t info_seed = InformationOptions{}.seed;
  std::string output;
};

void run_influence(const InfluenceArgs& a) {
  const auto p = parse_real_list(a.params);
  if (p.size() != 3) throw DomainError("--params expects MU,SIGMA,XI");
  const GevParams params(p[0], p[1], p[2]);
  const auto periods = a.periods.empty() ? std::vector<double>{} : parse_real_list(a.periods);
  const auto curve =
      influence_curves(params, parse_grid(a.grid), periods, {a.draws, a.info_seed});
  emit(a.output, [&](std::ostream& out) { write_influence_csv(out, curve); });
}

struct SimulateArgs {
  std::string config;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
};

void run_simulate(const SimulateArgs& a, bool has_reps, bool has_seed) {
  SimulationConfig config = a.config.empty() ? SimulationConfig{} : read_config(a.config);
  if (has_reps) config.reps = a.reps;
  if (has_seed) config.seed = a.seed;
  config.validate();
  const auto study = run_study(config, a.threads == 0 ? 1 : a.threads);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  emit((dir / "summary.json").string(),
       [&](std::ostream& out) { dump_json(out, summary_to_json(study.summary)); });
  emit((dir / "replicates.csv").string(),
       [&](std::ostream& out) { write_replicates_csv(out, study.records); });
}

void add_fit_options(CLI::App* cmd, FitArgs& a) {
  cmd->add_option("--blocks", a.blocks, "Block-maxima CSV (block_id,maximum,n_obs,n_full)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--estimator", a.estimator, "adjust, naive, discard, weight1 or weight2")
      ->check(CLI::IsMember({"adjust", "naive", "discard", "weight1", "weight2"}));
  cmd->add_option("--discard-threshold", a.discard_threshold,
                  "Largest missing fraction kept by the discard estimator")
      ->check(CLI::Range(0.0, 1.0));
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEV block-maxima analysis with missing observations"};
  app.require_subcommand(1);

  BlockmaxArgs bm;
  auto* blockmax = app.add_subcommand("blockmax", "Extract block maxima from a daily series");
  blockmax->add_option("--input", bm.input, "Series CSV with header date,value")
      ->required()
      ->check(CLI::ExistingFile);
  blockmax->add_option("--scheme", bm.scheme, "calendar_year or fixed_length")
      ->check(CLI::IsMember({"calendar_year", "fixed_length"}));
  blockmax->add_option("--length", bm.length, "Days per block for fixed_length");
  blockmax->add_option("--min-obs", bm.min_obs, "Drop blocks with fewer non-missing values");
  blockmax->add_option("--output", bm.output, "Block CSV path (default stdout)");
  blockmax->add_option("--report", bm.report, "Missingness report JSON path (default stderr)");

  FitArgs fa;
  auto* fitcmd = app.add_subcommand("fit", "Maximum-likelihood GEV fit");
  add_fit_options(fitcmd, fa);
  fitcmd->add_option("--output", fa.output, "JSON path (default stdout)");

  RlArgs ra;
  auto* rl = app.add_subcommand("rl", "Return levels with confidence intervals");
  add_fit_options(rl, ra.fit);
  rl->add_option("--periods", ra.periods, "Comma-separated return periods in blocks");
  rl->add_option("--level", ra.level, "Confidence level")->check(CLI::Range(0.0, 1.0));
  rl->add_option("--method", ra.method, "profile or delta")
      ->check(CLI::IsMember({"profile", "delta"}));
  rl->add_option("--output", ra.fit.output, "CSV path (default stdout)");

  DiagnoseArgs da;
  auto* diagnose = app.add_subcommand("diagnose", "PP, QQ, return-level and density plot data");
  add_fit_options(diagnose, da.fit);
  diagnose->add_option("--out-dir", da.out_dir, "Directory for the four CSV files");
  diagnose->add_option("--bins", da.bins, "Histogram bins (default Sturges)");

  InfluenceArgs ia;
  auto* influence = app.add_subcommand("influence", "Influence curves of the GEV MLE");
  influence->add_option("--params", ia.params, "MU,SIGMA,XI")->required();
  influence->add_option("--periods", ia.periods, "Comma-separated return periods");
  influence->add_option("--grid", ia.grid, "Normal-scale grid lo:hi:count");
  influence->add_option("--draws", ia.draws, "Monte Carlo draws for the information matrix");
  influence->add_option("--info-seed", ia.info_seed, "Seed for the information draws");
  influence->add_option("--output", ia.output, "CSV path (default stdout)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study of the estimators");
  simulate->add_option("--config", sa.config, "Run configuration JSON")->check(CLI::ExistingFile);
  auto* reps_opt = simulate->add_option("--reps", sa.reps, "Override the replicate count");
  auto* seed_opt = simulate->add_option("--seed", sa.seed, "Override the seed");
  simulate->add_option("--threads", sa.threads, "Worker threads (does not change the output)");
  simulate->add_option("--out-dir", sa.out_dir, "Directory for summary.json and replicates.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage_error", e.what());
    return 2;
  }

  try {
    if (blockmax->parsed()) run_blockmax(bm);
    if (fitcmd->parsed()) run_fit(fa);
    if (rl->parsed()) run_rl(ra);
    if (diagnose->parsed()) run_diagnose(da);
    if (influence->parsed()) run_influence(ia);
    if (simulate->parsed()) run_simulate(sa, reps_opt->count() > 0, seed_opt->count() > 0);
  } catch (const std::exception& e) {
    std::cerr << error_to_json(e).dump() << '\n';
    return 1;
  }
  return 0;
}
