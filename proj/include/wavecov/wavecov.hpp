#pragma once

// Umbrella header for the wavecov library: covariance kernels, spectral
// moments, regularity-condition integrals, and the spectral Monte Carlo
// simulator of the linear 3-D stochastic wave equation.

#include "wavecov/fit.hpp"
#include "wavecov/gauss.hpp"
#include "wavecov/geometry.hpp"
#include "wavecov/kernels.hpp"
#include "wavecov/moments.hpp"
#include "wavecov/quadrature.hpp"
#include "wavecov/regularity.hpp"
#include "wavecov/report.hpp"
#include "wavecov/rng.hpp"
#include "wavecov/simulator.hpp"
#include "wavecov/wave_kernel.hpp"
