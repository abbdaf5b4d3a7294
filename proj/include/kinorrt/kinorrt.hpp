#pragma once

// Umbrella header for the full toolkit.

#include "kinorrt/cleaning.hpp"
#include "kinorrt/config.hpp"
#include "kinorrt/datagen.hpp"
#include "kinorrt/dynamics.hpp"
#include "kinorrt/experiment.hpp"
#include "kinorrt/io.hpp"
#include "kinorrt/kdtree.hpp"
#include "kinorrt/planner.hpp"
#include "kinorrt/report.hpp"
#include "kinorrt/rng.hpp"
#include "kinorrt/surrogate.hpp"
#include "kinorrt/types.hpp"
