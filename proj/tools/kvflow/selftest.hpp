#pragma once

#include <ostream>

namespace kvflow {

// Verifies the production assembly and solve paths against independent dense
// oracles on the two coarsest meshes, plus the pure-function checks that need
// no mesh at all. Prints one line per check; returns false when any fails.
bool run_selftest(std::ostream& out);

}  // namespace kvflow
