#pragma once

#include "cowork/errors.hpp"
#include "cowork/grid.hpp"
#include "cowork/human_sim.hpp"
#include "cowork/mdp.hpp"
#include "cowork/perception.hpp"
#include "cowork/petri.hpp"
#include "cowork/rng.hpp"
#include "cowork/runner.hpp"
#include "cowork/scenario.hpp"
#include "cowork/trace_io.hpp"
