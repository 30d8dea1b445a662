#pragma once

#include "bounds.hpp"
#include "convex.hpp"
#include "dbar.hpp"
#include "error.hpp"
#include "extended.hpp"
#include "geom.hpp"
#include "interval.hpp"
#include "jensen.hpp"
#include "measure.hpp"
#include "minimize.hpp"
#include "properties.hpp"
#include "quadrature.hpp"
