#pragma once

// Umbrella header.

#include "common.hpp"
#include "config.hpp"
#include "current.hpp"
#include "curve.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "io.hpp"
#include "knots.hpp"
#include "pipelines.hpp"
#include "quadrature.hpp"
#include "synth.hpp"
#include "trig.hpp"
#include "tube.hpp"
