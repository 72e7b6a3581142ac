#pragma once

// Umbrella header.

#include "heins_lab/catalog.hpp"
#include "heins_lab/dynamics.hpp"
#include "heins_lab/errors.hpp"
#include "heins_lab/eval.hpp"
#include "heins_lab/geometry.hpp"
#include "heins_lab/map_expr.hpp"
#include "heins_lab/map_parser.hpp"
#include "heins_lab/parallel.hpp"
#include "heins_lab/report.hpp"
#include "heins_lab/straightening.hpp"
#include "heins_lab/suite.hpp"
#include "heins_lab/valiron.hpp"
