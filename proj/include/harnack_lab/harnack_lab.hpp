#pragma once

#include "harnack_lab/adjoint_solver.hpp"
#include "harnack_lab/calculus.hpp"
#include "harnack_lab/config.hpp"
#include "harnack_lab/errors.hpp"
#include "harnack_lab/estimator.hpp"
#include "harnack_lab/fields.hpp"
#include "harnack_lab/grid.hpp"
#include "harnack_lab/heat_solver.hpp"
#include "harnack_lab/linsolve.hpp"
#include "harnack_lab/presets.hpp"
#include "harnack_lab/report.hpp"
#include "harnack_lab/scenario.hpp"
#include "harnack_lab/tolerances.hpp"
