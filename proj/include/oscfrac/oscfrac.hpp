#pragma once

#include "oscfrac/asymptotics.hpp"
#include "oscfrac/calibration.hpp"
#include "oscfrac/error.hpp"
#include "oscfrac/fractal.hpp"
#include "oscfrac/generators.hpp"
#include "oscfrac/geometry.hpp"
#include "oscfrac/integral.hpp"
#include "oscfrac/json_io.hpp"
#include "oscfrac/newton.hpp"
#include "oscfrac/parallel.hpp"
#include "oscfrac/phase.hpp"
#include "oscfrac/quadrature.hpp"
#include "oscfrac/rational.hpp"
#include "oscfrac/report.hpp"
#include "oscfrac/special.hpp"
#include "oscfrac/windows.hpp"
