#pragma once

#include "msst/bench.hpp"
#include "msst/errors.hpp"
#include "msst/exclusion_tree.hpp"
#include "msst/geometry.hpp"
#include "msst/instance.hpp"
#include "msst/membership.hpp"
#include "msst/polytope.hpp"
#include "msst/report.hpp"
#include "msst/solver.hpp"
#include "msst/stats.hpp"
