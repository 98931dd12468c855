#pragma once

// Umbrella header: numerical tools for infinite systems of contracting
// similarities — exponent solving with certified brackets, invariant
// measure sampling, mean quadratic variation estimation, separation
// condition checks, and box-counting dimension fits.

#include "boxcount.hpp"
#include "conditions.hpp"
#include "cylinder.hpp"
#include "dimension.hpp"
#include "errors.hpp"
#include "interval.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "model_file.hpp"
#include "mqv.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "sequences.hpp"
