#pragma once

// Umbrella header. Certified computation of greedy beta-expansions, the
// Parry invariant measure and the generalized Takagi function G_beta, plus
// the regularity and limit-theorem experiment toolkit built on top of them.

#include "gtakagi/errors.hpp"
#include "gtakagi/real.hpp"
#include "gtakagi/exact.hpp"
#include "gtakagi/enclosure.hpp"
#include "gtakagi/beta.hpp"
#include "gtakagi/rng.hpp"
#include "gtakagi/parallel.hpp"
#include "gtakagi/dynamics.hpp"
#include "gtakagi/measure.hpp"
#include "gtakagi/takagi.hpp"
#include "gtakagi/regularity.hpp"
#include "gtakagi/stats.hpp"
