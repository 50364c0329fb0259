#pragma once

// Umbrella header for the glfit library: Gauss-Laplace (generalized normal)
// density and sampling, frequency-series construction, five estimation
// strategies, likelihood profiling, Grubbs outlier screening, and report
// formatting.

#include "data.hpp"
#include "estimators.hpp"
#include "gl.hpp"
#include "grubbs.hpp"
#include "optimize.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "special.hpp"
