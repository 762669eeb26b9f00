#pragma once

#include "liesys/errors.hpp"
#include "liesys/lie_core.hpp"
#include "liesys/random.hpp"
#include "liesys/spectral.hpp"
#include "liesys/point_set.hpp"
#include "liesys/system.hpp"
#include "liesys/accessibility.hpp"
#include "liesys/controllability.hpp"
#include "liesys/reach_sim.hpp"
#include "liesys/spec_file.hpp"
