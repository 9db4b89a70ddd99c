#pragma once

#include "cusp/bump.hpp"
#include "cusp/discrete_oracle.hpp"
#include "cusp/errors.hpp"
#include "cusp/floquet.hpp"
#include "cusp/ode.hpp"
#include "cusp/periodic_potential.hpp"
#include "cusp/reduction.hpp"
#include "cusp/volume_profile.hpp"
#include "cusp/warp_profile.hpp"
#include "cusp/warped_metric.hpp"
