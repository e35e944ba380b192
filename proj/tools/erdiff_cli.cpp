#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "erdiff/erdiff.h"

int main(int argc, char** argv) {
  CLI::App app{"Interacting diffusions on Erdos-Renyi graphs: coupled simulation, limit equation, diagnostics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", erd_version());

  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 0;

  const char* commands[][2] = {
      {"simulate", "one coupled quenched/annealed run with diagnostics"},
      {"sweep", "coupled runs over the n list and seeds, compared with the limit equation"},
      {"graph-check", "degree discrepancy, concentration bound and K_C per n"},
      {"pde", "solve the limit equation and write density snapshots"},
      {"ldp-check", "exponential-moment frequency per n"},
      {"compare", "convergence table and W1 matrix of particle and limit outputs"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("config", config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "replace the configured seed list by this seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  erd_overrides ov{};
  std::string name;
  for (auto* sub : app.get_subcommands()) {
    name = sub->get_name();
    ov.has_seed = sub->count("--seed") > 0 ? 1 : 0;
  }
  ov.seed = seed;
  ov.out_dir = out.empty() ? nullptr : out.c_str();
  ov.threads = threads;

  const int code = erd_run_subcommand(name.c_str(), config.c_str(), &ov);
  if (code == 0) {
    std::printf("%s\n", erd_last_message());
  } else {
    std::fprintf(stderr, "erdiff %s: %s\n", name.c_str(), erd_last_message());
  }
  return code;
}
