#pragma once

#include "types.hpp"
#include "dense.hpp"
#include "geometry.hpp"
#include "csm_map.hpp"
#include "annulus_map.hpp"
#include "series_engine.hpp"
#include "rh_solver.hpp"
#include "problem.hpp"
#include "field_eval.hpp"
#include "diagnostics.hpp"
#include "config.hpp"
#include "output.hpp"
