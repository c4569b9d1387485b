// Runs the built-in turning-in scenario end to end and prints the timing
// result: when the collision happens, when each detector first fires and the
// relative reaction-time gain of the grid-based chain over the prior map.

#include <iostream>

#include "threatgrid/threatgrid.hpp"

namespace tg = threatgrid;

int main() {
  const tg::ScenarioKind kind = tg::ScenarioKind::kTurningIn;
  const tg::Scenario sc = tg::build_scenario(kind, tg::default_params(kind));

  tg::NoiseConfig noise;
  noise.seed = 1;
  const tg::ScenarioRun run = tg::run_scenario(sc, noise, {});

  std::cout << "scenario " << tg::scenario_kind_name(kind) << '\n';
  std::cout << tg::serialize_result(run.result);
  return 0;
}
