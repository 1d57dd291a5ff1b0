#pragma once
// Everything in one include.

#include "lwave/continuum_oracle.hpp"
#include "lwave/errors.hpp"
#include "lwave/experiment.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/io.hpp"
#include "lwave/multiplier_search.hpp"
#include "lwave/precision.hpp"
#include "lwave/quaternion.hpp"
#include "lwave/scalar_traits.hpp"
#include "lwave/signal_synth.hpp"
#include "lwave/spectral.hpp"
#include "lwave/virtual_set.hpp"
#include "lwave/wave_stepper.hpp"
