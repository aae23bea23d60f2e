// End-to-end cost of one implicit time step on the production grid, for
// both inner-iteration modes.

#include <benchmark/benchmark.h>

#include "lcnls/scenario.hpp"
#include "lcnls/stepper.hpp"

using namespace lcnls;

namespace {

struct Setup {
    ScenarioConfig cfg;
    FieldState state;
    Setup() : cfg(preset_config("circular_headon")), state(initial_state(cfg)) {}
};

const Setup& setup() {
    static Setup s;
    return s;
}

} // namespace

static void BM_step(benchmark::State& bs, CouplingMode mode) {
    const Setup& s = setup();
    IterationControl ctrl;
    ctrl.mode = mode;
    Stepper stepper(s.cfg.model, s.cfg.grid, ctrl);
    FieldState st = s.state;
    for (auto _ : bs) {
        st = stepper.step(st);
        benchmark::DoNotOptimize(st);
    }
}
BENCHMARK_CAPTURE(BM_step, coupled, CouplingMode::Coupled);
BENCHMARK_CAPTURE(BM_step, lagged, CouplingMode::Lagged);

BENCHMARK_MAIN();
