#pragma once

#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "optrrt/cost_model.hpp"
#include "optrrt/planners.hpp"
#include "optrrt/world.hpp"

namespace optrrt {

/// Input that parsed but does not describe a usable instance. Carries every
/// problem found, one message each.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& issue : issues) out += (out.empty() ? "" : "; ") + issue;
    return out;
  }

  std::vector<std::string> issues_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlannerDefaults {
  std::optional<double> eta;
  double gamma_multiplier = 1.1;
  std::size_t iterations = 20000;
};

struct Scenario {
  std::string name;
  WorldModel world;
  CostModel cost;
  PlannerDefaults defaults;

  NearParams near_params() const {
    return NearParams::for_world(world, defaults.gamma_multiplier, defaults.eta);
  }
};

namespace detail {

using nlohmann::json;

inline std::vector<double> read_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError({what + ": expected an array of numbers"});
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError({what + ": expected an array of numbers"});
    out.push_back(v.get<double>());
  }
  return out;
}

inline Box read_box(const json& j, std::size_t d, const std::string& what) {
  if (!j.is_array() || j.size() != d) {
    throw ValidationError({what + ": expected " + std::to_string(d) + " [lo, hi] pairs"});
  }
  Box box;
  for (std::size_t k = 0; k < d; ++k) {
    const auto pair = read_vector(j[k], what);
    if (pair.size() != 2) throw ValidationError({what + ": each axis needs [lo, hi]"});
    box.lo.push_back(pair[0]);
    box.hi.push_back(pair[1]);
  }
  try {
    box.validate(d, what);
  } catch (const UsageError& e) {
    throw ValidationError({e.what()});
  }
  return box;
}

inline json box_to_json(const Box& box) {
  json out = json::array();
  for (std::size_t k = 0; k < box.dimension(); ++k) out.push_back({box.lo[k], box.hi[k]});
  return out;
}

}  // namespace detail

/// Builds a Scenario from its JSON form. Collects as many independent
/// problems as it can before throwing ValidationError.
inline Scenario parse_scenario(const nlohmann::json& j) {
  using detail::json;
  std::vector<std::string> issues;
  const auto attempt = [&issues](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    } catch (const UsageError& e) {
      issues.emplace_back(e.what());
    } catch (const json::exception& e) {
      issues.emplace_back(e.what());
    }
  };
  if (!j.is_object()) throw ValidationError({"scenario must be a JSON object"});

  std::size_t d = 0;
  attempt([&] {
    if (!j.contains("dimension") || !j["dimension"].is_number_integer() || j["dimension"].get<int>() < 2) {
      throw ValidationError({"dimension: expected an integer >= 2"});
    }
    d = j["dimension"].get<std::size_t>();
  });
  if (d == 0) throw ValidationError(issues);

  std::optional<Box> bounds;
  std::vector<Box> obstacles;
  std::optional<GoalRegion> goal;
  std::optional<Point> x_init;
  attempt([&] { bounds = detail::read_box(j.at("bounds"), d, "bounds"); });
  attempt([&] {
    const auto& list = j.value("obstacles", json::array());
    if (!list.is_array()) throw ValidationError({"obstacles: expected an array"});
    for (std::size_t i = 0; i < list.size(); ++i) {
      obstacles.push_back(detail::read_box(list[i], d, "obstacles[" + std::to_string(i) + "]"));
    }
  });
  attempt([&] {
    const auto& g = j.at("goal");
    const auto type = g.at("type").get<std::string>();
    if (type == "box") {
      goal = detail::read_box(g.at("bounds"), d, "goal.bounds");
    } else if (type == "ball") {
      GoalBall ball{detail::read_vector(g.at("center"), "goal.center"), g.at("radius").get<double>()};
      if (ball.center.size() != d) throw ValidationError({"goal.center: wrong dimension"});
      goal = ball;
    } else {
      throw ValidationError({"goal.type: expected \"box\" or \"ball\""});
    }
  });
  attempt([&] {
    auto coords = detail::read_vector(j.at("x_init"), "x_init");
    if (coords.size() != d) throw ValidationError({"x_init: wrong dimension"});
    x_init = Point(std::move(coords));
  });

  CostModel cost;
  attempt([&] {
    if (!j.contains("cost")) return;
    const auto& c = j["cost"];
    const auto kind = c.at("kind").get<std::string>();
    if (kind == "euclidean_length") return;
    if (kind != "line_integral") {
      throw ValidationError({"cost.kind: expected \"euclidean_length\" or \"line_integral\""});
    }
    std::vector<WeightedRegion> regions;
    const auto& list = c.value("regions", json::array());
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string what = "cost.regions[" + std::to_string(i) + "]";
      regions.push_back({detail::read_box(list[i].at("bounds"), d, what), list[i].at("weight").get<double>()});
    }
    cost = CostModel::line_integral(std::move(regions), c.value("default_weight", 1.0));
  });

  PlannerDefaults defaults;
  attempt([&] {
    if (!j.contains("planner")) return;
    const auto& p = j["planner"];
    if (p.contains("eta")) {
      defaults.eta = p["eta"].get<double>();
      if (!(*defaults.eta > 0.0)) throw ValidationError({"planner.eta: must be positive"});
    }
    defaults.gamma_multiplier = p.value("gamma_multiplier", 1.1);
    if (!(defaults.gamma_multiplier > 0.0)) {
      throw ValidationError({"planner.gamma_multiplier: must be positive"});
    }
    defaults.iterations = p.value("iterations", std::size_t{20000});
    if (defaults.iterations == 0) throw ValidationError({"planner.iterations: must be positive"});
  });

  if (!issues.empty()) throw ValidationError(issues);

  std::optional<WorldModel> world;
  attempt([&] { world.emplace(*bounds, obstacles, *goal, *x_init); });
  if (!issues.empty()) throw ValidationError(issues);
  for (std::size_t i = 0; i < world->obstacles().size(); ++i) {
    if (!world->bounds().contains_box(world->obstacles()[i])) {
      issues.push_back("obstacles[" + std::to_string(i) + "]: must lie inside bounds");
    }
  }
  if (!(free_space_measure(*world) > 0.0)) issues.emplace_back("free space has zero measure");
  if (!issues.empty()) throw ValidationError(issues);

  return Scenario{j.value("name", std::string("unnamed")), std::move(*world), std::move(cost), defaults};
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using detail::json;
  const WorldModel& w = s.world;
  json j;
  j["name"] = s.name;
  j["dimension"] = w.dimension();
  j["bounds"] = detail::box_to_json(w.bounds());
  j["obstacles"] = json::array();
  for (const Box& o : w.obstacles()) j["obstacles"].push_back(detail::box_to_json(o));
  if (const auto* box = std::get_if<Box>(&w.goal())) {
    j["goal"] = {{"type", "box"}, {"bounds", detail::box_to_json(*box)}};
  } else {
    const auto& ball = std::get<GoalBall>(w.goal());
    j["goal"] = {{"type", "ball"}, {"center", ball.center}, {"radius", ball.radius}};
  }
  j["x_init"] = std::vector<double>(w.x_init().coords().begin(), w.x_init().coords().end());
  if (s.cost.kind() == CostKind::euclidean_length) {
    j["cost"] = {{"kind", "euclidean_length"}};
  } else {
    json regions = json::array();
    for (const auto& r : s.cost.regions()) {
      regions.push_back({{"bounds", detail::box_to_json(r.box)}, {"weight", r.weight}});
    }
    j["cost"] = {{"kind", "line_integral"}, {"regions", regions}, {"default_weight", s.cost.default_weight()}};
  }
  json planner = {{"gamma_multiplier", s.defaults.gamma_multiplier}, {"iterations", s.defaults.iterations}};
  if (s.defaults.eta) planner["eta"] = *s.defaults.eta;
  j["planner"] = planner;
  return j;
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({origin + ": malformed JSON: " + e.what()});
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path);
}

/// The three reference instances: an empty square, an obstacle field with
/// two homotopy classes of solutions, and an obstacle-free cost field.
inline const std::map<std::string, std::string>& bundled_scenarios() {
  static const std::map<std::string, std::string> kScenarios{
      {"scenario1_empty", R"({
  "name": "scenario1_empty",
  "dimension": 2,
  "bounds": [[0, 10], [0, 10]],
  "obstacles": [],
  "goal": {"type": "box", "bounds": [[8, 9], [8, 9]]},
  "x_init": [1, 1],
  "cost": {"kind": "euclidean_length"},
  "planner": {"gamma_multiplier": 1.1, "iterations": 20000}
})"},
      {"scenario2_obstacles_two_homotopy", R"({
  "name": "scenario2_obstacles_two_homotopy",
  "dimension": 2,
  "bounds": [[0, 10], [0, 10]],
  "obstacles": [
    [[3, 7], [3.5, 9]],
    [[3, 7], [0, 2.9]]
  ],
  "goal": {"type": "box", "bounds": [[8.5, 9.5], [4.5, 5.5]]},
  "x_init": [1, 5],
  "cost": {"kind": "euclidean_length"},
  "planner": {"gamma_multiplier": 1.1, "iterations": 20000}
})"},
      {"scenario3_costfield", R"({
  "name": "scenario3_costfield",
  "dimension": 2,
  "bounds": [[0, 10], [0, 10]],
  "obstacles": [],
  "goal": {"type": "box", "bounds": [[8, 9], [8, 9]]},
  "x_init": [1, 1],
  "cost": {
    "kind": "line_integral",
    "regions": [
      {"bounds": [[3, 6], [3, 6]], "weight": 2},
      {"bounds": [[6.5, 7.5], [0.5, 8]], "weight": 0.5}
    ],
    "default_weight": 1
  },
  "planner": {"gamma_multiplier": 1.1, "iterations": 20000}
})"},
  };
  return kScenarios;
}

/// Resolves a bundled scenario name, otherwise reads the path from disk.
inline Scenario load_scenario(const std::string& name_or_path) {
  const auto& bundled = bundled_scenarios();
  if (const auto it = bundled.find(name_or_path); it != bundled.end()) {
    return parse_scenario(parse_json_text(it->second, name_or_path));
  }
  return parse_scenario(parse_json_text(read_text_file(name_or_path), name_or_path));
}

}  // namespace optrrt
