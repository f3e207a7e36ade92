#pragma once

#include "sbvsim/channel.hpp"
#include "sbvsim/config.hpp"
#include "sbvsim/errors.hpp"
#include "sbvsim/experiments.hpp"
#include "sbvsim/fairness.hpp"
#include "sbvsim/rate_engine.hpp"
#include "sbvsim/rng.hpp"
#include "sbvsim/scenario.hpp"
#include "sbvsim/tone_plan.hpp"
#include "sbvsim/version.hpp"
