#pragma once

#include "enes/benchmarks.hpp"
#include "enes/distribution.hpp"
#include "enes/errors.hpp"
#include "enes/fim.hpp"
#include "enes/gradient.hpp"
#include "enes/mixing.hpp"
#include "enes/optimizer.hpp"
#include "enes/population.hpp"
#include "enes/rng.hpp"
