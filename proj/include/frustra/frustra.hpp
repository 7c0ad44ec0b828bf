#pragma once

// Umbrella header for the frustra library: strip-lattice spin-glass
// instances, exact minimum T-joins, c-groundstates, domain-wall event
// detectors and the seeded Monte Carlo harness.

#include "frustra/rng.hpp"
#include "frustra/lattice.hpp"
#include "frustra/instance.hpp"
#include "frustra/matching.hpp"
#include "frustra/tjoin.hpp"
#include "frustra/groundstate.hpp"
#include "frustra/events.hpp"
#include "frustra/harness.hpp"
#include "frustra/report_io.hpp"
#include "frustra/verify.hpp"
