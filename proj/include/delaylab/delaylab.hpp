#pragma once

#include "delaylab/error.hpp"
#include "delaylab/quasipoly.hpp"
#include "delaylab/placement.hpp"
#include "delaylab/admissibility.hpp"
#include "delaylab/spectrum.hpp"
#include "delaylab/factorization.hpp"
#include "delaylab/dde_sim.hpp"
#include "delaylab/catalog.hpp"
#include "delaylab/json_io.hpp"
#include "delaylab/report.hpp"
#include "delaylab/service.hpp"
