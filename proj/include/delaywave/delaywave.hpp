#pragma once

#include "delaywave/analysis.hpp"
#include "delaywave/boundary.hpp"
#include "delaywave/characteristics.hpp"
#include "delaywave/checks.hpp"
#include "delaywave/config.hpp"
#include "delaywave/delay_line.hpp"
#include "delaywave/errors.hpp"
#include "delaywave/fdtd.hpp"
#include "delaywave/initial_data.hpp"
#include "delaywave/spectral.hpp"
#include "delaywave/sweep.hpp"
#include "delaywave/trace_types.hpp"
