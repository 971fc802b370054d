#pragma once

// Umbrella header: exit-time moment spectra and first Dirichlet eigenvalues
// of geodesic balls in rotationally symmetric model spaces.

#include "eigenmoment/bounds.hpp"
#include "eigenmoment/comparison.hpp"
#include "eigenmoment/errors.hpp"
#include "eigenmoment/growth.hpp"
#include "eigenmoment/moments.hpp"
#include "eigenmoment/radial_grid.hpp"
#include "eigenmoment/warping.hpp"
