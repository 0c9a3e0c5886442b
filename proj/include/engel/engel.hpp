#pragma once

// Umbrella header.
#include "elliptic.hpp"
#include "errors.hpp"
#include "expmap.hpp"
#include "maxwell.hpp"
#include "pendulum.hpp"
#include "synthesis.hpp"
