#pragma once

#include "liepoisson/core.hpp"
#include "liepoisson/lie3.hpp"
#include "liepoisson/solvers.hpp"
#include "liepoisson/poisson.hpp"
#include "liepoisson/models.hpp"
#include "liepoisson/integrators.hpp"
#include "liepoisson/harness.hpp"
