#pragma once

#include "rac/adversary.hpp"
#include "rac/detection.hpp"
#include "rac/errors.hpp"
#include "rac/graph.hpp"
#include "rac/graph_io.hpp"
#include "rac/numeric.hpp"
#include "rac/protocol.hpp"
#include "rac/scenario_io.hpp"
#include "rac/sim.hpp"
