#pragma once

#include "cbw/mat2.hpp"
#include "cbw/optics.hpp"
#include "cbw/noise.hpp"
#include "cbw/fringes.hpp"
#include "cbw/netlist.hpp"
#include "cbw/estimator.hpp"
#include "cbw/monte_carlo.hpp"
#include "cbw/io.hpp"
