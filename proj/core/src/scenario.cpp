#include "mapx/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "mapx/belief.hpp"

namespace mapx {

using detail::json;
using detail::require_keys;

namespace {

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("missing or malformed '" + std::string(key) + "' in " + where);
  }
}

Intersection parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ConfigError(where + " must be [x, y]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

GridSpec parse_grid(const json& j) {
  require_keys(j, {"nx", "ny"}, "grid");
  try {
    return GridSpec(get<int>(j, "nx", "grid"), get<int>(j, "ny", "grid"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

NoiseModel parse_noise(const json& j) {
  require_keys(j, {"false_negative", "false_positive"}, "noise");
  NoiseModel n;
  if (j.contains("false_negative")) n.false_negative = get<double>(j, "false_negative", "noise");
  if (j.contains("false_positive")) n.false_positive = get<double>(j, "false_positive", "noise");
  return n;
}

json map_json(const MapHypothesis& m) {
  json edges = json::array();
  const GridSpec& g = m.grid();
  for (int id = 0; id < g.edge_count(); ++id) {
    if (!m.has_edge(id)) continue;
    const Edge e = g.edge(id);
    edges.push_back({e.from.x, e.from.y, std::string(direction_name(e.dir))});
  }
  return json{{"nx", g.nx()}, {"ny", g.ny()}, {"edges", edges}};
}

MapHypothesis map_from(const json& j, std::optional<GridSpec> expected) {
  require_keys(j, {"nx", "ny", "edges"}, "map");
  GridSpec g = parse_grid(json{{"nx", j.value("nx", 0)}, {"ny", j.value("ny", 0)}});
  if (expected && !(g == *expected)) throw ConfigError("map grid does not match the scenario grid");
  EdgeSet edges(static_cast<std::size_t>(g.edge_count()), false);
  const json& list = j.at("edges");
  if (!list.is_array()) throw ConfigError("map edges must be a list");
  for (const auto& e : list) {
    if (!e.is_array() || e.size() != 3 || !e[2].is_string()) {
      throw ConfigError("map edge must be [x, y, direction]");
    }
    const Intersection p = parse_point(json::array({e[0], e[1]}), "map edge");
    auto d = parse_direction(e[2].get<std::string>());
    if (!d || !g.contains(p)) throw ConfigError("invalid map edge");
    auto id = g.edge_id(p, *d);
    if (!id) throw ConfigError("map edge leaves the grid");
    edges[static_cast<std::size_t>(*id)] = true;
  }
  try {
    return MapHypothesis(g, std::move(edges));
  } catch (const InvalidArgument& ex) {
    throw ConfigError(std::string("invalid map: ") + ex.what());
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

void Scenario::validate() const {
  if (hypotheses < 1) throw ConfigError("hypotheses must be at least 1");
  if (task_draws < 0) throw ConfigError("task_draws must be nonnegative");
  if (proposal_detectors < 1 || proposal_detectors > 4) {
    throw ConfigError("proposal_detectors must be between 1 and 4");
  }
  if (!(descend_threshold >= 0.0)) throw ConfigError("hierarchy threshold must be nonnegative");
  if (time_scale.traversal_minutes < 0.0 || time_scale.sensing_minutes < 0.0) {
    throw ConfigError("time scale constants must be nonnegative");
  }
  try {
    noise.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  double total = 0.0;
  for (const auto& t : tasks) {
    if (!grid.contains(t.origin) || !grid.contains(t.destination)) {
      throw ConfigError("task endpoint outside the grid");
    }
    if (!(t.expected_count >= 0.0)) throw ConfigError("expected_count must be nonnegative");
    total += t.expected_count;
  }
  if (task_draws > 0 && !(total > 0.0)) {
    throw ConfigError("task_draws needs tasks with positive expected counts");
  }
  if (world && !(world->grid() == grid)) throw ConfigError("world grid does not match");
  if (enumeration_budget < 1) throw ConfigError("enumeration_budget must be positive");
}

Scenario parse_scenario(std::string_view json_text) {
  const json j = parse_json(json_text);
  require_keys(j,
               {"grid", "seed", "hypotheses", "noise", "tasks", "task_draws", "structure",
                "hierarchy", "method", "proposal_detectors", "time_scale", "enumeration_budget",
                "world"},
               "scenario");
  Scenario s;
  if (j.contains("grid")) s.grid = parse_grid(j.at("grid"));
  if (j.contains("seed")) s.seed = get<std::uint64_t>(j, "seed", "scenario");
  if (j.contains("hypotheses")) s.hypotheses = get<int>(j, "hypotheses", "scenario");
  if (j.contains("noise")) s.noise = parse_noise(j.at("noise"));
  if (j.contains("tasks")) {
    const json& list = j.at("tasks");
    if (!list.is_array()) throw ConfigError("tasks must be a list");
    int next_id = 0;
    for (const auto& t : list) {
      require_keys(t, {"id", "origin", "destination", "expected_count"}, "task");
      TaskSpec task;
      task.id = t.contains("id") ? get<int>(t, "id", "task") : next_id;
      task.origin = parse_point(t.at("origin"), "task origin");
      task.destination = parse_point(t.at("destination"), "task destination");
      task.expected_count = t.contains("expected_count") ? get<double>(t, "expected_count", "task") : 1.0;
      next_id = task.id + 1;
      s.tasks.push_back(task);
    }
  }
  if (j.contains("task_draws")) s.task_draws = get<int>(j, "task_draws", "scenario");
  if (j.contains("structure")) {
    auto v = parse_structure(get<std::string>(j, "structure", "scenario"));
    if (!v) throw ConfigError("structure must be 'singly' or 'multiply'");
    s.structure = *v;
  }
  if (j.contains("hierarchy")) {
    const json& h = j.at("hierarchy");
    require_keys(h, {"enabled", "threshold"}, "hierarchy");
    if (h.contains("enabled")) s.hierarchy = get<bool>(h, "enabled", "hierarchy");
    if (h.contains("threshold")) s.descend_threshold = get<double>(h, "threshold", "hierarchy");
  }
  if (j.contains("method")) {
    auto m = parse_method(get<std::string>(j, "method", "scenario"));
    if (!m) throw ConfigError("unknown navigation method");
    s.method = *m;
  }
  if (j.contains("proposal_detectors")) {
    s.proposal_detectors = get<int>(j, "proposal_detectors", "scenario");
  }
  if (j.contains("time_scale")) {
    const json& t = j.at("time_scale");
    require_keys(t, {"traversal_minutes", "sensing_minutes"}, "time_scale");
    if (t.contains("traversal_minutes")) {
      s.time_scale.traversal_minutes = get<double>(t, "traversal_minutes", "time_scale");
    }
    if (t.contains("sensing_minutes")) {
      s.time_scale.sensing_minutes = get<double>(t, "sensing_minutes", "time_scale");
    }
  }
  if (j.contains("enumeration_budget")) {
    s.enumeration_budget = get<std::uint64_t>(j, "enumeration_budget", "scenario");
  }
  if (j.contains("world")) s.world = map_from(j.at("world"), s.grid);
  s.validate();
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json tasks = json::array();
  for (const auto& t : s.tasks) {
    tasks.push_back({{"id", t.id},
                     {"origin", detail::point(t.origin)},
                     {"destination", detail::point(t.destination)},
                     {"expected_count", t.expected_count}});
  }
  json j = {
      {"grid", {{"nx", s.grid.nx()}, {"ny", s.grid.ny()}}},
      {"seed", s.seed},
      {"hypotheses", s.hypotheses},
      {"noise", {{"false_negative", s.noise.false_negative},
                 {"false_positive", s.noise.false_positive}}},
      {"tasks", tasks},
      {"task_draws", s.task_draws},
      {"structure", std::string(structure_name(s.structure))},
      {"hierarchy", {{"enabled", s.hierarchy}, {"threshold", s.descend_threshold}}},
      {"method", std::string(method_name(s.method))},
      {"proposal_detectors", s.proposal_detectors},
      {"time_scale", {{"traversal_minutes", s.time_scale.traversal_minutes},
                      {"sensing_minutes", s.time_scale.sensing_minutes}}},
      {"enumeration_budget", s.enumeration_budget},
  };
  if (s.world) j["world"] = map_json(*s.world);
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_text_file(path)); }

std::string map_to_json(const MapHypothesis& m) { return map_json(m).dump() + "\n"; }

MapHypothesis parse_map(std::string_view json_text) {
  return map_from(parse_json(json_text), std::nullopt);
}

InferenceQuery parse_inference_query(std::string_view json_text) {
  const json j = parse_json(json_text);
  require_keys(j, {"grid", "noise", "structure", "maps", "hypotheses", "seed", "readings"},
               "query");
  InferenceQuery q;
  if (j.contains("grid")) q.grid = parse_grid(j.at("grid"));
  if (j.contains("noise")) q.noise = parse_noise(j.at("noise"));
  try {
    q.noise.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("structure")) {
    auto v = parse_structure(get<std::string>(j, "structure", "query"));
    if (!v) throw ConfigError("structure must be 'singly' or 'multiply'");
    q.structure = *v;
  }
  if (j.contains("hypotheses")) q.hypotheses = get<int>(j, "hypotheses", "query");
  if (q.hypotheses < 1) throw ConfigError("hypotheses must be at least 1");
  if (j.contains("seed")) q.seed = get<std::uint64_t>(j, "seed", "query");
  if (j.contains("maps")) {
    for (const auto& m : j.at("maps")) q.maps.push_back(map_from(m, q.grid));
  }
  if (j.contains("readings")) {
    for (const auto& r : j.at("readings")) {
      require_keys(r, {"at", "feature", "wedge", "result", "certain", "step"}, "reading");
      SensorReading reading;
      reading.location = parse_point(r.at("at"), "reading location");
      if (!q.grid.contains(reading.location)) throw ConfigError("reading outside the grid");
      auto f = parse_feature(get<std::string>(r, "feature", "reading"));
      if (!f) throw ConfigError("unknown feature");
      const int w = get<int>(r, "wedge", "reading");
      if (w < 0 || w >= kWedgeCount) throw ConfigError("wedge must be in 0..7");
      reading.detector = Detector{*f, Wedge{w}};
      reading.result = get<bool>(r, "result", "reading");
      if (r.contains("certain")) reading.certain = get<bool>(r, "certain", "reading");
      if (r.contains("step")) reading.step = get<int>(r, "step", "reading");
      q.readings.push_back(reading);
    }
  }
  return q;
}

std::string infer(const InferenceQuery& q) {
  BeliefConfig config;
  config.noise = q.noise;
  config.structure = q.structure;
  BeliefState belief = q.maps.empty()
                           ? init_belief(q.grid, q.hypotheses, q.seed, config)
                           : make_belief(q.grid, HypothesisSet{q.maps, false, 0, 0}, config);
  belief = with_evidence(belief, q.readings);
  json maps = json::array();
  for (std::size_t i = 0; i < belief.hypotheses().maps.size(); ++i) {
    maps.push_back({{"map", map_json(belief.hypotheses().maps[i])},
                    {"probability", detail::rounded(belief.probs()[i])}});
  }
  json out = {{"structure", std::string(structure_name(q.structure))},
              {"readings", q.readings.size()},
              {"hypotheses", maps},
              {"nota", detail::rounded(belief.nota())},
              {"nota_triggered", nota_triggered(belief)},
              {"map_estimate", belief.map_estimate()}};
  return out.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("failed writing " + path);
}

}  // namespace mapx
