#pragma once

#include "ccmfbm/covariance.hpp"
#include "ccmfbm/errors.hpp"
#include "ccmfbm/grid.hpp"
#include "ccmfbm/inference.hpp"
#include "ccmfbm/kernels.hpp"
#include "ccmfbm/operators.hpp"
#include "ccmfbm/parallel.hpp"
#include "ccmfbm/params.hpp"
#include "ccmfbm/quadrature.hpp"
#include "ccmfbm/rng.hpp"
#include "ccmfbm/simulation.hpp"
#include "ccmfbm/version.hpp"
