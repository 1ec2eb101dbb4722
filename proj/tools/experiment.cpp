#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "enes/errors.hpp"
#include "enes/rng.hpp"

namespace enes::tools {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGuessStream = 2;
constexpr std::uint64_t kOptimizerStream = 3;

std::string type_error(const std::string& key, const char* expected) {
  return "spec field '" + key + "' must be " + expected;
}

double get_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(type_error(key, "a number"));
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(type_error(key, "an integer"));
  return v.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(type_error(key, "a non-negative integer"));
}

int get_int(const json& v, const std::string& key) {
  const std::int64_t x = get_integer(v, key);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError("spec field '" + key + "' is out of range");
  }
  return static_cast<int>(x);
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(type_error(key, "a string"));
  return v.get<std::string>();
}

const json& get_array(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(type_error(key, "an array"));
  return v;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

struct RunOutcome {
  std::vector<GenerationLog> log;
  Termination termination = Termination::running;
  std::optional<std::uint64_t> evaluations_to_target;
  std::string error;
};

/// Runs to termination. Exceptions from the objective or optimizer end the
/// run and are reported through `error`.
RunOutcome execute(const RunConfig& config, const BenchmarkProblem& problem) {
  RunOutcome out;
  try {
    RunState state(config, make_objective(problem));
    try {
      while (state.check_termination() == Termination::running) state.step();
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    out.log = state.log();
    out.termination = state.termination();
    out.evaluations_to_target = state.evaluations_to_target();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::string status_of(const RunOutcome& run) {
  return run.error.empty() ? std::string(to_string(run.termination)) : std::string("error");
}

void report(const ExecutionOptions& options, const std::string& line) {
  static std::mutex mutex;
  if (!options.progress) return;
  std::lock_guard lock(mutex);
  options.progress(line);
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::converge: return "converge";
    case Mode::sweep: return "sweep";
    case Mode::trace: return "trace";
  }
  return "converge";
}

Mode parse_mode(std::string_view name) {
  if (name == "converge") return Mode::converge;
  if (name == "sweep") return Mode::sweep;
  if (name == "trace") return Mode::trace;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ExperimentSpec default_spec(Mode mode) {
  ExperimentSpec spec;
  spec.mode = mode;
  if (mode == Mode::sweep) {
    spec.functions = {FunctionId::Rastrigin};
    spec.dim = 2;
    spec.repetitions = 100;
    spec.target_precision = 0.01;
  } else if (mode == Mode::trace) {
    spec.functions = {FunctionId::Rastrigin};
    spec.dim = 2;
    spec.repetitions = 1;
    spec.target_precision = 0.01;
  }
  return spec;
}

void ExperimentSpec::validate() const {
  if (functions.empty()) throw ConfigError("at least one function is required");
  if (dim < 1) throw ConfigError("dim must be positive");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (!(target_precision > 0.0) || !std::isfinite(target_precision)) {
    throw ConfigError("target_precision must be positive and finite");
  }
  if (population_size < 2) throw ConfigError("population_size must be at least 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive and finite");
  }
  if (!(refresh_rate >= 0.0 && refresh_rate <= 1.0)) {
    throw ConfigError("refresh_rate must lie in [0, 1]");
  }
  if (max_evaluations == 0) throw ConfigError("max_evaluations must be positive");
  if (!(init_distance > 0.0) || !std::isfinite(init_distance)) {
    throw ConfigError("init_distance must be positive and finite");
  }
  if (mode == Mode::sweep) {
    if (init_distances.empty()) throw ConfigError("sweep mode needs at least one init distance");
    for (double r : init_distances) {
      if (!(r > 0.0) || !std::isfinite(r)) {
        throw ConfigError("init_distances must be positive and finite");
      }
    }
    if (population_sizes.empty()) throw ConfigError("sweep mode needs at least one population size");
    for (int n : population_sizes) {
      if (n < 2) throw ConfigError("population_sizes entries must be at least 2");
    }
    for (FunctionId f : functions) {
      if (is_unimodal(f)) {
        throw ConfigError("sweep mode needs multimodal functions, got " +
                          std::string(enes::to_string(f)));
      }
    }
  }
  if (mode == Mode::trace && functions.size() != 1) {
    throw ConfigError("trace mode takes exactly one function");
  }
}

ExperimentSpec parse_spec(std::string_view text, Mode fallback_mode) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("spec must be a JSON object");

  Mode mode = fallback_mode;
  if (auto it = doc.find("mode"); it != doc.end()) mode = parse_mode(get_string(*it, "mode"));
  ExperimentSpec spec = default_spec(mode);

  static const std::set<std::string> known{
      "mode", "function", "functions", "dim", "population_size", "population_sizes",
      "learning_rate", "refresh_rate", "baseline_mode", "step_normalization", "fim_path",
      "max_evaluations", "seed", "repetitions", "target_precision", "init_distance",
      "init_distances", "output"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError("unknown spec field '" + key + "'");
  }
  if (doc.contains("function") && doc.contains("functions")) {
    throw ConfigError("spec has both 'function' and 'functions'");
  }

  for (const auto& [key, v] : doc.items()) {
    if (key == "function") {
      spec.functions = {parse_function_id(get_string(v, key))};
    } else if (key == "functions") {
      spec.functions.clear();
      for (const auto& f : get_array(v, key)) {
        spec.functions.push_back(parse_function_id(get_string(f, key)));
      }
    } else if (key == "dim") {
      spec.dim = get_int(v, key);
    } else if (key == "population_size") {
      spec.population_size = get_int(v, key);
    } else if (key == "population_sizes") {
      spec.population_sizes.clear();
      for (const auto& n : get_array(v, key)) spec.population_sizes.push_back(get_int(n, key));
    } else if (key == "learning_rate") {
      spec.learning_rate = get_real(v, key);
    } else if (key == "refresh_rate") {
      spec.refresh_rate = get_real(v, key);
    } else if (key == "baseline_mode") {
      spec.baseline_mode = parse_baseline_mode(get_string(v, key));
    } else if (key == "step_normalization") {
      spec.step_normalization = parse_step_normalization(get_string(v, key));
    } else if (key == "fim_path") {
      spec.fim_path = parse_fim_path(get_string(v, key));
    } else if (key == "max_evaluations") {
      spec.max_evaluations = get_unsigned(v, key);
    } else if (key == "seed") {
      spec.seed = get_unsigned(v, key);
    } else if (key == "repetitions") {
      spec.repetitions = get_int(v, key);
    } else if (key == "target_precision") {
      spec.target_precision = get_real(v, key);
    } else if (key == "init_distance") {
      spec.init_distance = get_real(v, key);
    } else if (key == "init_distances") {
      spec.init_distances.clear();
      for (const auto& r : get_array(v, key)) spec.init_distances.push_back(get_real(r, key));
    } else if (key == "output") {
      spec.output = get_string(v, key);
    }
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path, Mode fallback_mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spec file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error while reading spec file '" + path + "'");
  return parse_spec(text.str(), fallback_mode);
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("ENES_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  if (*raw == '-' || *raw == '+') throw ConfigError("ENES_SEED must be an unsigned integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0') {
    throw ConfigError("ENES_SEED must be an unsigned integer");
  }
  return static_cast<std::uint64_t>(value);
}

RunConfig make_run_config(const ExperimentSpec& spec, int population_size,
                          std::uint64_t run_seed, const BenchmarkProblem& problem,
                          double init_distance) {
  RunConfig config;
  config.population_size = population_size;
  config.learning_rate = spec.learning_rate;
  config.refresh_rate = spec.refresh_rate;
  config.baseline_mode = spec.baseline_mode;
  config.step_normalization = spec.step_normalization;
  config.fim_path = spec.fim_path;
  config.target_fitness = target_fitness(problem.function, spec.target_precision);
  config.max_evaluations = spec.max_evaluations;
  config.seed = derive_seed(run_seed, kOptimizerStream);
  config.initial_mean = initial_guess(problem, init_distance, derive_seed(run_seed, kGuessStream));
  return config;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

void run_converge(const ExperimentSpec& spec, std::ostream& out, const ExecutionOptions& options) {
  spec.validate();
  const auto reps = static_cast<std::size_t>(spec.repetitions);
  const std::size_t total = spec.functions.size() * reps;
  std::vector<RunOutcome> runs(total);

  parallel_for(total, options.jobs, [&](std::size_t i) {
    const FunctionId f = spec.functions[i / reps];
    const std::uint64_t run_seed = spec.seed + i % reps;
    const BenchmarkProblem problem = make_problem(f, spec.dim, run_seed);
    runs[i] = execute(make_run_config(spec, spec.population_size, run_seed, problem,
                                      spec.init_distance),
                      problem);
    const RunOutcome& r = runs[i];
    report(options, "converge " + std::string(enes::to_string(f)) + " seed " +
                        std::to_string(run_seed) + ": " + status_of(r) + " after " +
                        std::to_string(r.log.empty() ? 0 : r.log.back().evaluations) +
                        " evaluations" + (r.error.empty() ? "" : " (" + r.error + ")"));
  });

  out << "kind,function,dim,seed,generation,evaluations,best_fitness_gap,status,successes,runs,"
         "median_evaluations\n";
  for (std::size_t fi = 0; fi < spec.functions.size(); ++fi) {
    const FunctionId f = spec.functions[fi];
    const std::string name(enes::to_string(f));
    std::vector<double> to_target;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const RunOutcome& run = runs[fi * reps + rep];
      const std::uint64_t run_seed = spec.seed + rep;
      for (std::size_t g = 0; g < run.log.size(); ++g) {
        const GenerationLog& entry = run.log[g];
        out << "generation," << name << ',' << spec.dim << ',' << run_seed << ','
            << entry.generation << ',' << entry.evaluations << ','
            << format_double(fitness_gap(f, entry.best_fitness)) << ','
            << (g + 1 == run.log.size() ? status_of(run) : std::string()) << ",,,\n";
      }
      if (run.evaluations_to_target) {
        to_target.push_back(static_cast<double>(*run.evaluations_to_target));
      }
    }
    out << "summary," << name << ',' << spec.dim << ",,,,,," << to_target.size() << ',' << reps
        << ',' << (to_target.empty() ? std::string() : format_double(median(to_target)))
        << '\n';
  }
}

void run_sweep(const ExperimentSpec& spec, std::ostream& out, const ExecutionOptions& options) {
  spec.validate();
  const auto reps = static_cast<std::size_t>(spec.repetitions);
  const std::size_t cells =
      spec.functions.size() * spec.population_sizes.size() * spec.init_distances.size();
  std::vector<char> success(cells * reps, 0);

  parallel_for(cells * reps, options.jobs, [&](std::size_t i) {
    const std::size_t cell = i / reps;
    const std::size_t rep = i % reps;
    const std::size_t di = cell % spec.init_distances.size();
    const std::size_t pi = (cell / spec.init_distances.size()) % spec.population_sizes.size();
    const std::size_t fi = cell / (spec.init_distances.size() * spec.population_sizes.size());
    const std::uint64_t run_seed = spec.seed + rep;
    const BenchmarkProblem problem = make_problem(spec.functions[fi], spec.dim, run_seed);
    const RunOutcome r = execute(make_run_config(spec, spec.population_sizes[pi], run_seed,
                                                 problem, spec.init_distances[di]),
                                 problem);
    success[i] = r.evaluations_to_target.has_value() ? 1 : 0;
    if (rep + 1 == reps) {
      report(options, "sweep " + std::string(enes::to_string(spec.functions[fi])) + " n=" +
                          std::to_string(spec.population_sizes[pi]) + " distance " +
                          format_double(spec.init_distances[di]) + ": last repetition " +
                          status_of(r));
    }
  });

  out << "function,pop_size,init_distance,runs,successes,success_rate\n";
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t di = cell % spec.init_distances.size();
    const std::size_t pi = (cell / spec.init_distances.size()) % spec.population_sizes.size();
    const std::size_t fi = cell / (spec.init_distances.size() * spec.population_sizes.size());
    std::size_t hits = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) hits += success[cell * reps + rep];
    out << enes::to_string(spec.functions[fi]) << ',' << spec.population_sizes[pi] << ','
        << format_double(spec.init_distances[di]) << ',' << reps << ',' << hits << ','
        << format_double(static_cast<double>(hits) / static_cast<double>(reps)) << '\n';
  }
}

void run_trace(const ExperimentSpec& spec, std::ostream& out, const ExecutionOptions& options) {
  spec.validate();
  const FunctionId f = spec.functions.front();
  const BenchmarkProblem problem = make_problem(f, spec.dim, spec.seed);
  const RunConfig config =
      make_run_config(spec, spec.population_size, spec.seed, problem, spec.init_distance);
  const int d = spec.dim;
  const ThetaLayout layout(d);

  out << "generation,evaluations,best_fitness";
  for (int i = 0; i < d; ++i) out << ",mean_" << i;
  for (int r = 0; r < d; ++r) {
    for (int c = r; c < d; ++c) out << ",a_" << r << '_' << c;
  }
  for (int i = 0; i < d; ++i) out << ",best_" << i;
  out << '\n';

  auto write_row = [&](const RunState& state) {
    const GenerationLog& entry = state.log().back();
    out << entry.generation << ',' << entry.evaluations << ',' << format_double(entry.best_fitness);
    const Eigen::VectorXd theta = layout.flatten(state.distribution());
    for (Eigen::Index i = 0; i < theta.size(); ++i) out << ',' << format_double(theta[i]);
    for (int i = 0; i < d; ++i) out << ',' << format_double(state.best_individual()[i]);
    out << '\n';
  };

  RunState state(config, make_objective(problem));
  write_row(state);
  std::string error;
  try {
    while (state.check_termination() == Termination::running) {
      state.step();
      write_row(state);
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  report(options, "trace " + std::string(enes::to_string(f)) + " seed " +
                      std::to_string(spec.seed) + ": " +
                      (error.empty() ? std::string(enes::to_string(state.termination()))
                                     : "error (" + error + ")") +
                      " after " + std::to_string(state.evaluations()) + " evaluations");
}

void run_experiment(const ExperimentSpec& spec, std::ostream& fallback,
                    const ExecutionOptions& options) {
  spec.validate();
  std::ofstream file;
  if (!spec.output.empty()) {
    file.open(spec.output, std::ios::out | std::ios::trunc);
    if (!file) throw IoError("cannot open output file '" + spec.output + "'");
  }
  std::ostringstream csv;
  switch (spec.mode) {
    case Mode::converge: run_converge(spec, csv, options); break;
    case Mode::sweep: run_sweep(spec, csv, options); break;
    case Mode::trace: run_trace(spec, csv, options); break;
  }
  std::ostream& out = spec.output.empty() ? fallback : file;
  out << csv.str();
  out.flush();
  if (!out) throw IoError("failed to write output" + (spec.output.empty() ? std::string() : " '" + spec.output + "'"));
}

}  // namespace enes::tools
