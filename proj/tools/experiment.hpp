#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "enes/benchmarks.hpp"
#include "enes/gradient.hpp"
#include "enes/optimizer.hpp"

namespace enes::tools {

/// Output could not be opened or written. Maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { converge, sweep, trace };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// One experiment. JSON keys use the member names.
///
/// Run r of a function uses seed + r; that value fixes the problem's rotation
/// and translation, the initial guess and the optimizer's random stream.
struct ExperimentSpec {
  Mode mode = Mode::converge;
  std::vector<FunctionId> functions{FunctionId::Sphere};
  int dim = 5;
  int population_size = 50;
  /// Sweep mode only.
  std::vector<int> population_sizes{20, 100};
  double learning_rate = 1.0;
  double refresh_rate = kDefaultRefreshRate;
  BaselineMode baseline_mode = BaselineMode::block;
  StepNormalization step_normalization = StepNormalization::population;
  FimPath fim_path = FimPath::automatic;
  std::uint64_t max_evaluations = 100000;
  std::uint64_t seed = 0;
  int repetitions = 20;
  double target_precision = 1e-10;
  /// Distance of the initial guess from the optimum (converge, trace).
  double init_distance = 1.0;
  /// Sweep mode only.
  std::vector<double> init_distances{0.1, 1.0, 10.0, 100.0, 1000.0};
  /// Empty means stdout.
  std::string output;

  /// Throws ConfigError.
  void validate() const;
};

/// Defaults for a mode: sweep runs 100 repetitions on d=2 with precision
/// 0.01, trace a single run; converge keeps the struct defaults.
ExperimentSpec default_spec(Mode mode);

/// Parses a JSON document. Keys absent from the document keep the defaults of
/// its "mode" (or of `fallback_mode` when "mode" is absent). Unknown keys and
/// ill-typed values throw ConfigError.
ExperimentSpec parse_spec(std::string_view json, Mode fallback_mode = Mode::converge);

/// Reads and parses a spec file. Throws IoError if it cannot be read.
ExperimentSpec load_spec(const std::string& path, Mode fallback_mode = Mode::converge);

/// ENES_SEED, if set; throws ConfigError if it is not an unsigned integer.
std::optional<std::uint64_t> seed_from_environment();

RunConfig make_run_config(const ExperimentSpec& spec, int population_size,
                          std::uint64_t run_seed, const BenchmarkProblem& problem,
                          double init_distance);

/// Runs `count` independent tasks on up to `jobs` threads; task(i) must only
/// touch slot i of its outputs.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

struct ExecutionOptions {
  int jobs = 1;
  /// Receives one line per finished run; may be empty.
  std::function<void(const std::string&)> progress;
};

/// CSV writers. Columns are fixed; floats use 17 significant digits.
///
/// converge: kind,function,dim,seed,generation,evaluations,best_fitness_gap,
///           status,successes,runs,median_evaluations
///   kind=generation rows, one per generation of every run including
///   generation 0; status holds the termination reason on a run's last row.
///   kind=summary rows, one per function; median_evaluations is the median
///   evaluations-to-target over successful runs, empty if there are none.
/// sweep:    function,pop_size,init_distance,runs,successes,success_rate
/// trace:    generation,evaluations,best_fitness,mean_<i>...,a_<r>_<c>...,best_<i>...
///   A entries in layout order (row-major upper triangle); generation 0 first.
void run_converge(const ExperimentSpec& spec, std::ostream& out, const ExecutionOptions& options);
void run_sweep(const ExperimentSpec& spec, std::ostream& out, const ExecutionOptions& options);
void run_trace(const ExperimentSpec& spec, std::ostream& out, const ExecutionOptions& options);

/// Dispatches on spec.mode and writes to spec.output (or `fallback` if empty).
void run_experiment(const ExperimentSpec& spec, std::ostream& fallback,
                    const ExecutionOptions& options);

std::string format_double(double value);

}  // namespace enes::tools
