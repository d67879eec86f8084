// Umbrella header.

#pragma once

#include "cgmd/basis.hpp"
#include "cgmd/dynamics.hpp"
#include "cgmd/errors.hpp"
#include "cgmd/experiment.hpp"
#include "cgmd/io.hpp"
#include "cgmd/lattice.hpp"
#include "cgmd/projection.hpp"
#include "cgmd/quadrature.hpp"
#include "cgmd/reduction.hpp"
