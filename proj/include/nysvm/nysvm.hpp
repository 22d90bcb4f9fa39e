#pragma once

#include "nysvm/config.hpp"
#include "nysvm/data.hpp"
#include "nysvm/diagnostics.hpp"
#include "nysvm/experiment.hpp"
#include "nysvm/io.hpp"
#include "nysvm/kernel.hpp"
#include "nysvm/nystrom.hpp"
#include "nysvm/random.hpp"
#include "nysvm/sampling.hpp"
#include "nysvm/solver.hpp"
#include "nysvm/synth.hpp"
#include "nysvm/types.hpp"
