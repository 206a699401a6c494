#pragma once

#include "ndqmc/acceptance.hpp"
#include "ndqmc/bounds.hpp"
#include "ndqmc/discrepancy.hpp"
#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/integrate.hpp"
#include "ndqmc/io.hpp"
#include "ndqmc/negdep.hpp"
#include "ndqmc/parallel.hpp"
#include "ndqmc/point_set.hpp"
#include "ndqmc/report_io.hpp"
#include "ndqmc/rng.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/stats.hpp"
#include "ndqmc/strata.hpp"
#include "ndqmc/symmetric.hpp"
