#pragma once

#include "sstforge/words.hpp"
#include "sstforge/automata.hpp"
#include "sstforge/transducers.hpp"
#include "sstforge/asst.hpp"
#include "sstforge/bimachines.hpp"
#include "sstforge/conversions.hpp"
#include "sstforge/refinement.hpp"
#include "sstforge/minimization.hpp"
#include "sstforge/congruences.hpp"
#include "sstforge/json_io.hpp"
#include "sstforge/fixtures.hpp"
