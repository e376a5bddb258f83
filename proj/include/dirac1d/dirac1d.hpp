#pragma once

#include "model.hpp"
#include "potentials.hpp"
#include "integrator.hpp"
#include "parallel.hpp"
#include "scattering.hpp"
#include "spectrum.hpp"
#include "levinson.hpp"
#include "io.hpp"
#include "cli.hpp"
