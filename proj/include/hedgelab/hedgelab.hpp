#pragma once

#include "hedgelab/bsm.hpp"
#include "hedgelab/config.hpp"
#include "hedgelab/equations.hpp"
#include "hedgelab/fbm.hpp"
#include "hedgelab/friction.hpp"
#include "hedgelab/gbm.hpp"
#include "hedgelab/hedgesim.hpp"
#include "hedgelab/jumpdiff.hpp"
#include "hedgelab/lattice.hpp"
#include "hedgelab/market.hpp"
#include "hedgelab/math.hpp"
#include "hedgelab/parallel.hpp"
#include "hedgelab/paths.hpp"
#include "hedgelab/pde1d.hpp"
#include "hedgelab/pde2d.hpp"
#include "hedgelab/power_assets.hpp"
#include "hedgelab/rng.hpp"
#include "hedgelab/sesv.hpp"
#include "hedgelab/stochvol.hpp"
