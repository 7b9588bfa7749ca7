#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mapx/errors.hpp"
#include "mapx/harness.hpp"
#include "mapx/scenario.hpp"

namespace {

using namespace mapx;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

struct ScenarioFlags {
  std::string file;
  std::optional<std::uint64_t> seed;
  std::optional<int> nx, ny, hypotheses, task_draws;
  std::optional<double> fn, fp;
  std::optional<std::string> structure, method;

  void add(CLI::App* app) {
    app->add_option("--scenario", file, "Scenario JSON file");
    app->add_option("--seed", seed, "Override the scenario seed");
    app->add_option("--nx", nx, "Grid width (intersections)");
    app->add_option("--ny", ny, "Grid height (intersections)");
    app->add_option("-k,--hypotheses", hypotheses, "Hypothesis set size K");
    app->add_option("--tasks", task_draws, "Number of tasks to execute");
    app->add_option("--fn", fn, "Detector false negative rate");
    app->add_option("--fp", fp, "Detector false positive rate");
    app->add_option("--structure", structure, "singly or multiply");
    app->add_option("--method", method, "Navigation method");
  }

  Scenario build() const {
    Scenario s = file.empty() ? Scenario{} : load_scenario(file);
    if (nx || ny) {
      s.grid = GridSpec(nx.value_or(s.grid.nx()), ny.value_or(s.grid.ny()));
      s.world.reset();
    }
    if (seed) s.seed = *seed;
    if (hypotheses) s.hypotheses = *hypotheses;
    if (task_draws) s.task_draws = *task_draws;
    if (fn) s.noise.false_negative = *fn;
    if (fp) s.noise.false_positive = *fp;
    if (structure) {
      auto v = parse_structure(*structure);
      if (!v) throw ConfigError("structure must be 'singly' or 'multiply'");
      s.structure = *v;
    }
    if (method) {
      auto v = parse_method(*method);
      if (!v) throw ConfigError("unknown navigation method '" + *method + "'");
      s.method = *v;
    }
    if (s.tasks.empty() && s.task_draws > 0) {
      s.tasks.push_back(TaskSpec{0, {0, 0}, {s.grid.nx() - 1, s.grid.ny() - 1}, 1.0});
      s.tasks.push_back(TaskSpec{1, {s.grid.nx() - 1, s.grid.ny() - 1}, {0, 0}, 1.0});
    }
    s.validate();
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-theoretic map exploration simulator"};
  app.require_subcommand(1);
  std::string out;

  auto* gen = app.add_subcommand("generate", "Write a sampled world or a default scenario");
  std::string kind = "world";
  int gen_nx = 3, gen_ny = 3;
  std::uint64_t gen_seed = 1;
  bool gen_uniform = false;
  gen->add_option("kind", kind, "world or scenario")->check(CLI::IsMember({"world", "scenario"}));
  gen->add_option("--nx", gen_nx, "Grid width")->check(CLI::Range(1, 64));
  gen->add_option("--ny", gen_ny, "Grid height")->check(CLI::Range(1, 64));
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_flag("--uniform", gen_uniform, "Sample worlds without the density preference");
  gen->add_option("-o,--out", out, "Output path (default stdout)");

  auto* sim = app.add_subcommand("simulate", "Run one episode and write its JSONL log");
  ScenarioFlags sim_flags;
  sim_flags.add(sim);
  sim->add_option("-o,--out", out, "Output path (default stdout)");

  auto* bench = app.add_subcommand("benchmark", "Clique-cost sweep on the 4x4 grid (CSV)");
  Table1Config tc;
  bench->add_option("--runs", tc.runs, "Runs per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", tc.seed, "Random seed");
  bench->add_option("--sizes", tc.hypothesis_sizes, "Hypothesis set sizes")->delimiter(',');
  bench->add_option("--lengths", tc.exploration_lengths, "Explored intersection counts")
      ->delimiter(',');
  bench->add_option("--fn", tc.noise.false_negative, "Detector false negative rate");
  bench->add_option("--fp", tc.noise.false_positive, "Detector false positive rate");
  bench->add_flag("--timing", tc.timing, "Measure propagation time (non-deterministic column)");
  bench->add_option("-o,--out", out, "Output path (default stdout)");

  auto* cmp = app.add_subcommand("compare", "Compare navigation methods (CSV)");
  ScenarioFlags cmp_flags;
  cmp_flags.add(cmp);
  std::vector<std::string> method_names{"weighted_path", "shortest_ignoring_unknown",
                                        "avoid_known", "random_walk"};
  int trials = 50;
  int rollouts = 20;
  cmp->add_option("--methods", method_names, "Methods to compare")->delimiter(',');
  cmp->add_option("--trials", trials, "Trials per method")->check(CLI::PositiveNumber);
  cmp->add_option("--rollouts", rollouts, "Monte Carlo rollouts per estimate")
      ->check(CLI::NonNegativeNumber);
  cmp->add_option("-o,--out", out, "Output path (default stdout)");

  auto* inf = app.add_subcommand("infer", "Posterior over hypotheses from an evidence file");
  std::string query_file;
  inf->add_option("query", query_file, "Query JSON file")->required();
  inf->add_option("-o,--out", out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const GridSpec grid(gen_nx, gen_ny);
      if (kind == "world") {
        emit(out, map_to_json(sample_map(grid, gen_seed, !gen_uniform)));
      } else {
        Scenario s;
        s.grid = grid;
        s.seed = gen_seed;
        s.task_draws = 3;
        s.tasks.push_back(TaskSpec{0, {0, 0}, {gen_nx - 1, gen_ny - 1}, 2.0});
        s.tasks.push_back(TaskSpec{1, {gen_nx - 1, 0}, {0, gen_ny - 1}, 1.0});
        emit(out, scenario_to_json(s));
      }
    } else if (sim->parsed()) {
      emit(out, run_episode(sim_flags.build()).to_jsonl());
    } else if (bench->parsed()) {
      emit(out, table1_csv(benchmark_table1(tc)));
    } else if (cmp->parsed()) {
      std::vector<NavigationMethod> methods;
      for (const auto& name : method_names) {
        auto m = parse_method(name);
        if (!m) throw ConfigError("unknown navigation method '" + name + "'");
        methods.push_back(*m);
      }
      emit(out, methods_csv(compare_methods(cmp_flags.build(), methods, trials, rollouts)));
    } else if (inf->parsed()) {
      emit(out, infer(parse_inference_query(read_text_file(query_file))));
    }
  } catch (const mapx::Error& e) {
    std::fprintf(stderr, "mapx: %s\n", e.what());
    return 2;
  }
  return 0;
}
