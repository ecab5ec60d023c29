#pragma once

// Umbrella header for the pbphase library: canonical-phase distributions,
// moments and fluctuation measures for single and paired optical beams,
// post-selected two-port statistics, and figure/overlay emission.

#include "pbphase/bessel.hpp"
#include "pbphase/checks.hpp"
#include "pbphase/common.hpp"
#include "pbphase/distribution.hpp"
#include "pbphase/experiment.hpp"
#include "pbphase/figures.hpp"
#include "pbphase/fluctuations.hpp"
#include "pbphase/nfm.hpp"
#include "pbphase/quadrature.hpp"
#include "pbphase/relative_phase.hpp"
#include "pbphase/state.hpp"
