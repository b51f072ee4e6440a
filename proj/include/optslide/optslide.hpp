#pragma once

#include "numerics.hpp"
#include "oracles.hpp"
#include "reductions.hpp"
#include "problems.hpp"
#include "base_solvers.hpp"
#include "catalyst.hpp"
#include "harness.hpp"
