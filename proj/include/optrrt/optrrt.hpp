#pragma once

#include "optrrt/geometry.hpp"
#include "optrrt/world.hpp"
#include "optrrt/kd_index.hpp"
#include "optrrt/cost_model.hpp"
#include "optrrt/planners.hpp"
#include "optrrt/path_query.hpp"
#include "optrrt/scenario.hpp"
#include "optrrt/bench.hpp"
#include "optrrt/svg.hpp"
