#pragma once

#include "mtga/benchmarks.hpp"
#include "mtga/core.hpp"
#include "mtga/experiment.hpp"
#include "mtga/fuzzy.hpp"
#include "mtga/metrics.hpp"
#include "mtga/operators.hpp"
#include "mtga/report.hpp"
#include "mtga/solvers.hpp"
#include "mtga/tank.hpp"
#include "mtga/transfer.hpp"
