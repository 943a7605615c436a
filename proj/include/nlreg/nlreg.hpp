#pragma once

// Umbrella header.

#include "error.hpp"
#include "numeric.hpp"
#include "metric_space.hpp"
#include "modulus.hpp"
#include "svmap.hpp"
#include "induction.hpp"
#include "certificate.hpp"
#include "certifiers.hpp"
#include "regularity.hpp"
#include "prop41.hpp"
#include "conventional.hpp"
#include "ekeland.hpp"
#include "lp.hpp"
#include "polyhedral.hpp"
#include "optcond.hpp"
