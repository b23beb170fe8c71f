#pragma once

#include "sheath/error.hpp"
#include "sheath/numerics.hpp"
#include "sheath/model.hpp"
#include "sheath/grid.hpp"
#include "sheath/sagdeev.hpp"
#include "sheath/stationary.hpp"
#include "sheath/state.hpp"
#include "sheath/diagnostics.hpp"
#include "sheath/poisson.hpp"
#include "sheath/dynamics.hpp"
#include "sheath/io.hpp"
#include "sheath/harness/config.hpp"
#include "sheath/harness/run.hpp"
#include "sheath/harness/sweep.hpp"
