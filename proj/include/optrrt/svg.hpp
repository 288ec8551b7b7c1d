#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <variant>

#include "optrrt/cost_model.hpp"
#include "optrrt/path_query.hpp"
#include "optrrt/planners.hpp"
#include "optrrt/world.hpp"

namespace optrrt {

/// Static drawing of a planner graph over the first two axes: bounds,
/// obstacles, cost regions, goal, one <polyline class="edge"> per edge
/// (one per symmetric pair in graph mode), vertices, and the best path in
/// <g id="best-path">.
inline std::string render_svg(const PlannerGraph& g, const WorldModel& world, const CostModel& cost,
                              const PathResult& best) {
  constexpr double kCanvas = 800.0;
  const Box& b = world.bounds();
  const double span = std::max(b.hi[0] - b.lo[0], b.hi[1] - b.lo[1]);
  const double scale = kCanvas / span;
  const double width = (b.hi[0] - b.lo[0]) * scale;
  const double height = (b.hi[1] - b.lo[1]) * scale;
  const auto px = [&](double x) { return (x - b.lo[0]) * scale; };
  const auto py = [&](double y) { return height - (y - b.lo[1]) * scale; };

  std::string out;
  char buf[256];
  const auto emit = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  const auto rect = [&](const Box& box, const char* cls, const char* style) {
    emit("<rect class=\"%s\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" style=\"%s\"/>\n", cls,
         px(box.lo[0]), py(box.hi[1]), (box.hi[0] - box.lo[0]) * scale, (box.hi[1] - box.lo[1]) * scale,
         style);
  };

  emit("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.3f %.3f\">\n",
       width, height, width, height);
  rect(b, "bounds", "fill:white;stroke:black;stroke-width:1");
  for (const auto& region : cost.regions()) {
    rect(region.box, "region", region.weight > cost.default_weight() ? "fill:#f4b183;fill-opacity:0.5"
                                                                     : "fill:#9dc3e6;fill-opacity:0.5");
  }
  for (const Box& o : world.obstacles()) rect(o, "obstacle", "fill:#404040");
  if (const auto* box = std::get_if<Box>(&world.goal())) {
    rect(*box, "goal", "fill:magenta;fill-opacity:0.6");
  } else {
    const auto& ball = std::get<GoalBall>(world.goal());
    emit("<circle class=\"goal\" cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" style=\"fill:magenta;fill-opacity:0.6\"/>\n",
         px(ball.center[0]), py(ball.center[1]), ball.radius * scale);
  }

  out += "<g id=\"edges\" style=\"stroke:#3060c0;stroke-width:0.6;fill:none\">\n";
  for (VertexId u = 0; u < g.size(); ++u) {
    for (VertexId v : g.neighbors(u)) {
      if (g.mode() == GraphMode::symmetric && v < u) continue;
      emit("<polyline class=\"edge\" points=\"%.3f,%.3f %.3f,%.3f\"/>\n", px(g.vertex(u)[0]), py(g.vertex(u)[1]),
           px(g.vertex(v)[0]), py(g.vertex(v)[1]));
    }
  }
  out += "</g>\n<g id=\"vertices\" style=\"fill:#202020\">\n";
  for (const Point& p : g.vertices()) emit("<circle class=\"vertex\" cx=\"%.3f\" cy=\"%.3f\" r=\"1\"/>\n", px(p[0]), py(p[1]));
  out += "</g>\n<g id=\"best-path\" style=\"stroke:red;stroke-width:2.5;fill:none\">\n";
  if (best.found) {
    out += "<polyline class=\"best\" points=\"";
    bool first = true;
    for (const Point& p : best.waypoints.waypoints()) {
      emit(first ? "%.3f,%.3f" : " %.3f,%.3f", px(p[0]), py(p[1]));
      first = false;
    }
    out += "\"/>\n";
  }
  out += "</g>\n";
  const Point& root = world.x_init();
  emit("<circle class=\"root\" cx=\"%.3f\" cy=\"%.3f\" r=\"4\" style=\"fill:green\"/>\n", px(root[0]), py(root[1]));
  out += "</svg>\n";
  return out;
}

}  // namespace optrrt
