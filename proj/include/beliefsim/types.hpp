#pragma once

#include <cstdint>

namespace beliefsim {

/// Discrete simulation time. Tick 0 is "before the first observation";
/// schedules and experiment loops start at tick 1.
using Tick = std::uint64_t;

/// Index into the proposition universe [0, k).
using PropositionId = std::uint32_t;

}  // namespace beliefsim
