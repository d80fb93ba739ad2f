#pragma once

#include "spectro/version.hpp"
#include "spectro/multi_index.hpp"
#include "spectro/specfun.hpp"
#include "spectro/phase_point.hpp"
#include "spectro/quadrature.hpp"
#include "spectro/states.hpp"
#include "spectro/inner_product.hpp"
#include "spectro/densities.hpp"
#include "spectro/sampler.hpp"
#include "spectro/observable.hpp"
#include "spectro/expectation.hpp"
