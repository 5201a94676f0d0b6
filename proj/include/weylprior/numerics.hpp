#pragma once

#include "weylprior/numerics/differentiation.hpp"
#include "weylprior/numerics/path.hpp"
#include "weylprior/numerics/quadrature.hpp"
