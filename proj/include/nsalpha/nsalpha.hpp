#pragma once

// Pseudo-spectral simulator and analysis toolkit for the two-parameter
// family of filtered incompressible flow models on the periodic 3-torus.

#include "nsalpha/diagnostics.hpp"
#include "nsalpha/dynamics.hpp"
#include "nsalpha/filters.hpp"
#include "nsalpha/grid.hpp"
#include "nsalpha/presets.hpp"
#include "nsalpha/random_field.hpp"
#include "nsalpha/rational.hpp"
#include "nsalpha/runner.hpp"
#include "nsalpha/singularity.hpp"
#include "nsalpha/spectral_field.hpp"
#include "nsalpha/spectral_ops.hpp"
#include "nsalpha/transform.hpp"
#include "nsalpha/version.hpp"
