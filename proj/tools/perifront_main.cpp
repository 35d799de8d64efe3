#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perifront/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"perifront: free-boundary spreading in space-time periodic media"};
  app.require_subcommand(1);

  const std::vector<std::string> tasks = {
      "solve",       "periodic-state", "speed-direct",    "speed-recursion",
      "speed-cauchy", "semiwave",      "dichotomy",       "mu-sweep",
      "verify-theorem4", "check-below-p"};

  std::string config_path, out_dir;
  int jobs = 1;
  std::vector<CLI::App*> subs;
  for (const auto& t : tasks) {
    CLI::App* sub = app.add_subcommand(t);
    sub->add_option("--config", config_path, "config JSON path")->required();
    sub->add_option("--jobs", jobs, "parallel workers for sweeps/probes");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    subs.push_back(sub);
  }
  CLI::App* cmp = app.add_subcommand("compare", "cross-method speed table");
  std::vector<std::string> results;
  cmp->add_option("results", results, "result.json paths")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmp->parsed()) return perifront::run_compare(results);
    for (size_t i = 0; i < tasks.size(); ++i)
      if (subs[i]->parsed())
        return perifront::run_task(tasks[i], config_path, out_dir, jobs);
  } catch (const perifront::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
