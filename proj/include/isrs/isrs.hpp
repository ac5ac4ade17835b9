#pragma once

#include "isrs/bench.hpp"
#include "isrs/closedform.hpp"
#include "isrs/errors.hpp"
#include "isrs/inverse.hpp"
#include "isrs/link.hpp"
#include "isrs/multispan.hpp"
#include "isrs/ode_oracle.hpp"
#include "isrs/osnr.hpp"
#include "isrs/profiles.hpp"
#include "isrs/spectrum.hpp"
#include "isrs/units.hpp"
