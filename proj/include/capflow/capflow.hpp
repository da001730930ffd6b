#pragma once

#include "space_form.hpp"
#include "cap.hpp"
#include "grid.hpp"
#include "surface.hpp"
#include "observables.hpp"
#include "fit.hpp"
#include "flow.hpp"
#include "convergence.hpp"
#include "verify.hpp"
