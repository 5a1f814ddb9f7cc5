#pragma once

#include "dlmcol/bench.hpp"
#include "dlmcol/coloring.hpp"
#include "dlmcol/crossover.hpp"
#include "dlmcol/distance.hpp"
#include "dlmcol/engine.hpp"
#include "dlmcol/graph.hpp"
#include "dlmcol/init.hpp"
#include "dlmcol/localsearch.hpp"
#include "dlmcol/parallel.hpp"
#include "dlmcol/population.hpp"
#include "dlmcol/record.hpp"
#include "dlmcol/rng.hpp"
#include "dlmcol/surrogate.hpp"
