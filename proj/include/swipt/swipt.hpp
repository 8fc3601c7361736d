#pragma once

#include <swipt/common.hpp>
#include <swipt/modem.hpp>
#include <swipt/power.hpp>
#include <swipt/interleaver.hpp>
#include <swipt/rotation.hpp>
#include <swipt/energy.hpp>
#include <swipt/link.hpp>
#include <swipt/harness/config.hpp>
#include <swipt/harness/control.hpp>
#include <swipt/harness/spectrum.hpp>
#include <swipt/harness/scenario.hpp>
#include <swipt/harness/report_io.hpp>
