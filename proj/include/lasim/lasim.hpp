// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header: pulls in the whole library.

#pragma once

#include "lasim/cli_config.hpp"
#include "lasim/environment.hpp"
#include "lasim/harness.hpp"
#include "lasim/io.hpp"
#include "lasim/metrics.hpp"
#include "lasim/presets.hpp"
#include "lasim/probability.hpp"
#include "lasim/rng.hpp"
#include "lasim/schemes.hpp"
