#pragma once

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/scenario.hpp"

namespace ccmdvsp::fixtures {

// Two-depot, eight-trip grid instance. Times are in half-unit ticks so that
// the half-minute start of trip 5 stays integral; costs are grid units.
Instance grid_example();
Schedule grid_left();
Schedule grid_right();

// Two scenarios on top of grid_example (lb = ub = 0, e = 0).
ScenarioSet grid_scenarios(const Instance& inst);
ServiceParams grid_params();

// Eight trips; trips 1..6 chained on one bus with the leg times of the
// worked C-MIS example, trips 7 and 8 on their own buses.
Instance worked_chain();
ScenarioSet chain_scenario(const Instance& inst);
Schedule chain_schedule();
ServiceParams chain_params();

}  // namespace ccmdvsp::fixtures
