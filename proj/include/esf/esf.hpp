#pragma once

#include "esf/core.hpp"
#include "esf/rng.hpp"
#include "esf/partitions.hpp"
#include "esf/measure.hpp"
#include "esf/samplers.hpp"
#include "esf/wreath.hpp"
#include "esf/allele_stats.hpp"
#include "esf/poisson.hpp"
#include "esf/wf_sim.hpp"
#include "esf/stats.hpp"
