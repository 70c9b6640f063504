#pragma once

/* Umbrella header: the whole simulator. */

#include "coverage.hpp"
#include "csv.hpp"
#include "datapath.hpp"
#include "dbw.hpp"
#include "harness/event_queue.hpp"
#include "harness/log.hpp"
#include "harness/report.hpp"
#include "harness/run.hpp"
#include "harness/scenario.hpp"
#include "harness/validate.hpp"
#include "json_io.hpp"
#include "power.hpp"
#include "power_registers.hpp"
#include "rng.hpp"
#include "timesync.hpp"
#include "topology.hpp"
