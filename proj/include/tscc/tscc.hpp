#pragma once

// Umbrella header for the tile-streaming cybersickness-control library.

#include "tscc/config.hpp"
#include "tscc/controller.hpp"
#include "tscc/costs.hpp"
#include "tscc/grid.hpp"
#include "tscc/local_search.hpp"
#include "tscc/metadata.hpp"
#include "tscc/oracle.hpp"
#include "tscc/quality_dp.hpp"
#include "tscc/queues.hpp"
#include "tscc/simulation.hpp"
#include "tscc/trace.hpp"
#include "tscc/viewport.hpp"
