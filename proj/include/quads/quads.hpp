#pragma once

#include "quads/core.hpp"
#include "quads/dynamics.hpp"
#include "quads/ec3.hpp"
#include "quads/fitting.hpp"
#include "quads/hamiltonian.hpp"
#include "quads/io.hpp"
#include "quads/log.hpp"
#include "quads/noise.hpp"
#include "quads/protocol.hpp"
#include "quads/state.hpp"
#include "quads/statistics.hpp"
