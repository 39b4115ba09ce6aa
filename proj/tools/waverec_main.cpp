#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "waverec/scenario.hpp"
#include "waverec/version.hpp"

namespace fs = std::filesystem;
using waverec::scenario::RunOptions;
using waverec::scenario::RunOutcome;

namespace {

int write_report(const RunOutcome& outcome, const std::string& out_path) {
  if (!outcome.report.is_null() && !out_path.empty()) {
    // write-then-rename keeps partially written reports invisible
    std::string tmp = out_path + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) {
        std::cerr << "cannot write report to " << out_path << "\n";
        return 1;
      }
      out << outcome.report.dump(2) << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, out_path, ec);
    if (ec) {
      std::cerr << "cannot move report into place: " << ec.message() << "\n";
      return 1;
    }
  }
  return 0;
}

int run_one(const std::string& path, const RunOptions& opts, const std::string& out_path) {
  auto t0 = std::chrono::steady_clock::now();
  RunOutcome outcome = waverec::scenario::run_scenario_file(path, opts);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  std::cout << path << ": " << outcome.summary << " [" << ms << " ms]\n";
  if (int rc = write_report(outcome, out_path); rc != 0) return rc;
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waverec: optimal detection, identification and estimation of wave patterns"};
  app.set_version_flag("--version", waverec::kVersion);
  app.require_subcommand(1);

  RunOptions opts;
  std::string scenario_path, out_path, batch_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", opts.tol, "certificate tolerance");
    sub->add_option("--fock-dim", opts.fock_dim, "default Fock truncation");
    sub->add_option("--seed", opts.seed, "oracle seed");
    sub->add_option("--max-iters", opts.max_iters, "solver iteration cap");
    sub->add_option("--csv-dir", opts.csv_dir, "directory for CSV tables");
    sub->add_flag("--verify", opts.verify, "run the oracle cross-check inline");
    sub->add_option("-o,--output", out_path, "report output path");
  };

  std::vector<std::string> kinds = {"detect", "identify", "bloch", "estimate",
                                    "validate", "verify"};
  std::vector<CLI::App*> subs;
  for (const auto& k : kinds) {
    CLI::App* sub = app.add_subcommand(k, "run a " + k + " scenario file");
    sub->add_option("scenario", scenario_path, "scenario JSON path")->required();
    add_common(sub);
    subs.push_back(sub);
  }
  CLI::App* batch = app.add_subcommand("batch", "run every *.json scenario in a directory");
  batch->add_option("dir", batch_dir, "directory of scenarios")->required();
  add_common(batch);
  CLI::App* schema = app.add_subcommand("schema", "print the scenario JSON schema");

  CLI11_PARSE(app, argc, argv);

  if (schema->parsed()) {
    std::cout << waverec::scenario::schema_text() << "\n";
    return 0;
  }
  if (batch->parsed()) {
    int worst = 0;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(batch_dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::string rep = out_path.empty() ? "" : out_path + "/" + f.stem().string() + ".report.json";
      if (!out_path.empty()) fs::create_directories(out_path);
      worst = std::max(worst, run_one(f.string(), opts, rep));
    }
    return worst;
  }
  for (size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      if (kinds[i] == "verify") {
        // verify takes a previously written report file directly
        auto t0 = std::chrono::steady_clock::now();
        RunOutcome outcome = waverec::scenario::verify_report_file(scenario_path, opts);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::cout << scenario_path << ": " << outcome.summary << " [" << ms << " ms]\n";
        if (int rc = write_report(outcome, out_path); rc != 0) return rc;
        return outcome.exit_code;
      }
      // the scenario file's own "kind" is authoritative; the subcommand name
      // is a convenience and must match
      std::ifstream in(scenario_path);
      if (in) {
        try {
          auto j = waverec::scenario::Json::parse(in);
          if (j.value("kind", "") != kinds[i]) {
            std::cerr << "scenario kind '" << j.value("kind", "")
                      << "' does not match subcommand '" << kinds[i] << "'\n";
            return 1;
          }
        } catch (...) {
          // parsing errors are reported uniformly by run_scenario_file
        }
      }
      return run_one(scenario_path, opts, out_path);
    }
  }
  return 1;
}
