#pragma once

#include "qam/bench.hpp"
#include "qam/encode.hpp"
#include "qam/errors.hpp"
#include "qam/hologram.hpp"
#include "qam/pattern_io.hpp"
#include "qam/rng.hpp"
#include "qam/types.hpp"
