#pragma once

// Umbrella header: counting and estimating correlation-immune boolean
// functions, with supporting combinatorics and spectral tools.

#include "errors.hpp"       // error taxonomy shared by every module
#include "combinations.hpp" // binomial table + revolving-door subset walk
#include "boolfn.hpp"       // truth tables, Walsh spectra, OA conversion
#include "census.hpp"       // exact counts by weight slice
#include "oracle.hpp"       // independent polynomial / lattice recounts
#include "asymptotics.hpp"  // closed-form count estimates
#include "hadamard.hpp"     // sign-matrix counting and the census identity
