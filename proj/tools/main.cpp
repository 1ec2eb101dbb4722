#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "enes/errors.hpp"
#include "experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

template <typename T>
void override_with(std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace enes;
  using namespace enes::tools;

  CLI::App app{"Efficient Natural Evolution Strategies experiment runner"};
  app.require_subcommand(0, 1);

  std::optional<std::string> config_path;
  std::vector<std::string> function_names;
  std::optional<int> dim;
  std::optional<int> population_size;
  std::vector<int> population_sizes;
  std::optional<double> learning_rate;
  std::optional<double> refresh_rate;
  std::optional<std::string> baseline_mode;
  std::optional<std::string> step_normalization;
  std::optional<std::string> fim_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_evaluations;
  std::optional<double> target_precision;
  std::optional<double> init_distance;
  std::vector<double> init_distances;
  std::optional<int> repetitions;
  std::optional<std::string> output;
  int jobs = 1;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON experiment spec");
  app.add_option("--function", function_names, "Benchmark function (repeatable)");
  app.add_option("--dim", dim, "Problem dimension");
  app.add_option("--population-size", population_size, "Population size n");
  app.add_option("--population-sizes", population_sizes, "Population sizes for sweep mode");
  app.add_option("--learning-rate", learning_rate, "Learning rate");
  app.add_option("--refresh-rate", refresh_rate, "Minimal refresh rate for importance mixing");
  app.add_option("--baseline-mode", baseline_mode, "block, uniform or parameter_specific");
  app.add_option("--step-normalization", step_normalization, "population or utility");
  app.add_option("--fim-path", fim_path, "recurrence, factored or automatic");
  app.add_option("--seed", seed, "Base seed (overrides ENES_SEED and the spec)");
  app.add_option("--max-evaluations", max_evaluations, "Evaluation budget per run");
  app.add_option("--target-precision", target_precision, "Fitness gap counted as success");
  app.add_option("--init-distance", init_distance, "Initial distance from the optimum");
  app.add_option("--init-distances", init_distances, "Initial distances for sweep mode");
  app.add_option("--repetitions", repetitions, "Runs per function (or per sweep cell)");
  app.add_option("--output", output, "CSV output path (stdout if omitted)");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Suppress progress lines");

  auto* converge = app.add_subcommand("converge", "Convergence curves on unimodal functions");
  auto* sweep = app.add_subcommand("sweep", "Success rate by population size and distance");
  auto* trace = app.add_subcommand("trace", "Per-generation mean, A and best individual");
  for (auto* sub : {converge, sweep, trace}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    std::optional<Mode> mode;
    if (converge->parsed()) mode = Mode::converge;
    if (sweep->parsed()) mode = Mode::sweep;
    if (trace->parsed()) mode = Mode::trace;

    ExperimentSpec spec = config_path ? load_spec(*config_path, mode.value_or(Mode::converge))
                                      : default_spec(mode.value_or(Mode::converge));
    if (mode) spec.mode = *mode;

    if (!function_names.empty()) {
      spec.functions.clear();
      for (const auto& name : function_names) spec.functions.push_back(parse_function_id(name));
    }
    if (!population_sizes.empty()) spec.population_sizes = population_sizes;
    if (!init_distances.empty()) spec.init_distances = init_distances;
    override_with(dim, spec.dim);
    override_with(population_size, spec.population_size);
    override_with(learning_rate, spec.learning_rate);
    override_with(refresh_rate, spec.refresh_rate);
    override_with(max_evaluations, spec.max_evaluations);
    override_with(target_precision, spec.target_precision);
    override_with(init_distance, spec.init_distance);
    override_with(repetitions, spec.repetitions);
    override_with(output, spec.output);
    if (baseline_mode) spec.baseline_mode = parse_baseline_mode(*baseline_mode);
    if (step_normalization) spec.step_normalization = parse_step_normalization(*step_normalization);
    if (fim_path) spec.fim_path = parse_fim_path(*fim_path);
    if (auto env_seed = seed_from_environment()) spec.seed = *env_seed;
    override_with(seed, spec.seed);

    ExecutionOptions options;
    options.jobs = jobs;
    if (!quiet) {
      // With CSV on stdout, progress goes to stderr.
      std::ostream& progress = spec.output.empty() ? std::cerr : std::cout;
      options.progress = [&progress](const std::string& line) { progress << line << '\n'; };
    }
    run_experiment(spec, std::cout, options);
  } catch (const IoError& e) {
    std::cerr << "enes: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "enes: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "enes: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
