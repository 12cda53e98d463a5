#include "persid/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "persid/dataset_io.hpp"
#include "persid/error.hpp"
#include "persid/parallel.hpp"
#include "persid/pipeline.hpp"

namespace persid {
namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::string format = "both";
  bool force = false;
  bool quiet = false;
  unsigned threads = 0;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kConfigError, "cannot write " + path.string());
  out << content;
}

std::string consistency_csv(const std::vector<ConsistencyRow>& rows) {
  std::string out = "n_records,discrepancy\n";
  for (const auto& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", row.n_records, row.discrepancy);
    out += buf;
  }
  return out;
}

StageSelection stages_for(const std::string& subcommand) {
  if (subcommand == "simulate") return StageSelection::simulate_only();
  if (subcommand == "fit") return StageSelection::through_fit();
  if (subcommand == "validate") return StageSelection::through_validate();
  if (subcommand == "informativeness") return StageSelection::informativeness_only();
  return StageSelection::all();
}

std::string summary(const std::string& subcommand, const PipelineReport& report) {
  if (report.equivalence) {
    const auto& eq = *report.equivalence;
    std::string line = "sup_value=" + fmt(eq.sup_value) + " delta=" + fmt(eq.delta) +
                       " verdict=" + (eq.pass ? "pass" : "fail");
    if (report.intrinsic) {
      line += " epsilon_star_estimate=" + fmt(report.intrinsic->epsilon_star_estimate);
    }
    return line;
  }
  if (subcommand == "informativeness" && report.informativeness) {
    const auto& sel = report.informativeness->selection;
    return "Delta=" + fmt(sel.report.delta_value) + " family=" + std::to_string(sel.index) +
           " informative=" + (sel.report.informative ? "yes" : "no");
  }
  if (report.fit) {
    return "final_loss=" + fmt(report.fit->final_loss) +
           " iterations=" + std::to_string(report.fit->iterations);
  }
  return "records=" + std::to_string(report.training.size()) +
         " groups=" + std::to_string(report.training.groups.size());
}

int execute(const Invocation& inv, std::ostream& out) {
  if (inv.threads > 0) set_thread_limit(inv.threads);
  Scenario scenario = load_scenario(inv.config_path);
  if (inv.seed_override) scenario.seed = *inv.seed_override;

  const fs::path dir(inv.out_dir);
  const bool want_json = inv.format != "csv";
  const bool want_csv = inv.format != "json";
  std::vector<fs::path> targets;
  if (want_json) targets.push_back(dir / "report.json");
  if (want_csv) targets.push_back(dir / "equivalence.csv");
  targets.push_back(dir / "timings.json");
  if (inv.subcommand == "simulate") targets.push_back(dir / "data" / "manifest.json");
  if (!inv.force) {
    for (const auto& t : targets) {
      if (fs::exists(t)) {
        fail(ErrorCode::kConfigError, t.string() + " exists; pass --force to overwrite");
      }
    }
  }

  const auto report = run_pipeline(scenario, stages_for(inv.subcommand));

  fs::create_directories(dir);
  if (inv.subcommand == "simulate") write_dataset(dir / "data", report.training);
  if (want_json) {
    Json j = pipeline_report_to_json(report);
    j["provenance"]["seed_overridden"] = inv.seed_override.has_value();
    j["provenance"]["subcommand"] = inv.subcommand;
    write_file(dir / "report.json", dump_json(j));
  }
  if (want_csv) {
    if (report.equivalence) write_file(dir / "equivalence.csv", equivalence_csv(*report.equivalence));
    if (report.consistency) write_file(dir / "consistency.csv", consistency_csv(*report.consistency));
  }
  write_file(dir / "timings.json", dump_json(timings_to_json(report)));
  if (!inv.quiet) out << summary(inv.subcommand, report) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perturbation-based behavioral system identification"};
  app.require_subcommand(1, 1);
  Invocation inv;
  for (const char* name : {"simulate", "fit", "validate", "informativeness", "pipeline"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", inv.config_path, "Scenario JSON file")->required();
    sub->add_option("--out", inv.out_dir, "Output directory");
    sub->add_option("--seed", inv.seed_override, "Override the scenario seed");
    sub->add_option("--format", inv.format, "json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_flag("--force", inv.force, "Overwrite existing reports");
    sub->add_flag("--quiet", inv.quiet, "Suppress the summary line");
    sub->add_option("--threads", inv.threads, "Worker thread cap (default PERSID_THREADS)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitConfig;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  try {
    return execute(inv, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace persid
