#pragma once

// Umbrella header: balanced truncation with exact-error certificates for
// SISO systems, sign-parameter extraction from arrowhead realizations, and
// power-network aggregate models.

#include "baltrunc/arrowhead.hpp"
#include "baltrunc/balance.hpp"
#include "baltrunc/errors.hpp"
#include "baltrunc/gramian.hpp"
#include "baltrunc/gridmodel.hpp"
#include "baltrunc/hinfnorm.hpp"
#include "baltrunc/io.hpp"
#include "baltrunc/linalg.hpp"
#include "baltrunc/matrix.hpp"
#include "baltrunc/state_space.hpp"
#include "baltrunc/tolerances.hpp"
