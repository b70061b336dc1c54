// locmin command-line driver: profile, roc, discover, wavefront.

#include "locmin/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  unsigned threads = 1;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path, "key=value config file");
  sub->add_option("--seed", f.seed, "master seed (overrides the config)");
  sub->add_option("--out", f.out, "output directory (overrides the config)");
  sub->add_option("--set", f.sets, "override one key, key=value (repeatable)");
  sub->add_option("--threads", f.threads, "worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 256u));
}

locmin::RunContext resolve(const CommonFlags& f) {
  locmin::RunContext ctx;
  if (!f.config_path.empty()) ctx.config.load_file(f.config_path);
  for (const auto& s : f.sets) ctx.config.set_assignment(s);
  if (f.seed) ctx.config.set("seed", std::to_string(*f.seed));
  if (!f.out.empty()) ctx.config.set("out", f.out);
  ctx.threads = f.threads;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"locmin: test whether a converged local optimum of a likelihood is global"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"profile", "negative log-likelihood profile and local minima of the sinusoid benchmark"},
      {"roc", "Monte-Carlo trials and ROC curves for the validation tests"},
      {"discover", "learn relaxation directions from spurious minima"},
      {"wavefront", "Strehl shells, PSF bound checks and the restart demo"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : locmin::kExitError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const locmin::RunContext ctx = resolve(flags);
    return locmin::run_command(command, ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return locmin::kExitError;
  }
}
