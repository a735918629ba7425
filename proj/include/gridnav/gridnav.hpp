#pragma once

#include "bench.hpp"
#include "controller.hpp"
#include "geometry.hpp"
#include "graph_planners.hpp"
#include "gridmap.hpp"
#include "plan.hpp"
#include "smt_encode.hpp"
#include "solver.hpp"
