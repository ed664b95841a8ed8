#pragma once

#include "worldline/errors.hpp"
#include "worldline/expr.hpp"
#include "worldline/format.hpp"
#include "worldline/functionals.hpp"
#include "worldline/quadrature.hpp"
#include "worldline/trajectory.hpp"
#include "worldline/units.hpp"
#include "worldline/variational.hpp"
#include "worldline/worldsheet.hpp"
