#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "shiftforge/cli_io.hpp"

using namespace shiftforge;

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shiftforge: shift spaces over group alphabets"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.bounds.bound = default_bound();
  bool serial = false;

  auto add_common = [&](CLI::App* sub, bool needs_spec) {
    auto* opt = sub->add_option("--spec", cfg.spec_path, "shift spec JSON");
    if (needs_spec) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", cfg.seed, "seed for sampled checks")->capture_default_str();
    sub->add_option("--bound", cfg.bounds.bound, "letters enumerated per search")->capture_default_str();
    sub->add_option("--depth", cfg.bounds.depth, "stage depth")->capture_default_str();
    sub->add_option("--samples", cfg.bounds.samples, "sample count")->capture_default_str();
    sub->add_option("--transient", cfg.bounds.transient, "transient cap")->capture_default_str();
    sub->add_option("--period", cfg.bounds.period, "period cap")->capture_default_str();
    sub->add_option("--k", cfg.k, "follower length")->capture_default_str();
    sub->add_option("--n", cfg.n, "block length")->capture_default_str();
    sub->add_option("--block", cfg.block, "block as a JSON array of letters");
    sub->add_option("--emit-dot", cfg.emit_dot, "DOT output path");
    sub->add_option("--out", cfg.out, "report path (default stdout)");
    sub->add_flag("--serial", serial, "run check batches serially");
  };
  for (const char* name : {"verify", "classify", "followers", "classes", "op-check", "decompose", "graph"}) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, true);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  auto* embed = app.add_subcommand("embed", "chain-monoid embedding");
  add_common(embed, false);
  embed->add_option("--monoid", cfg.monoid_path, "monoid JSON")->required()->check(CLI::ExistingFile);
  embed->callback([&cfg] { cfg.command = "embed"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }
  if (serial) cfg.exec = Exec::Serial;

  RunResult r = run(cfg);
  for (const auto& line : r.trace) std::cerr << line << "\n";
  for (const auto& [path, text] : r.dot_files)
    if (!write_file(path, text)) {
      std::cerr << "cannot write " << path << "\n";
      return kInputError;
    }
  const std::string text = r.report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else if (!write_file(cfg.out, text)) {
    std::cerr << "cannot write " << cfg.out << "\n";
    return kInputError;
  }
  if (r.report.contains("error")) std::cerr << r.report["error"]["code"].get<std::string>() << ": "
                                            << r.report["error"]["message"].get<std::string>() << "\n";
  return r.exit_code;
}
