#pragma once

#include "ressd/lattice/basis.hpp"
#include "ressd/lattice/bkz.hpp"
#include "ressd/lattice/enumeration.hpp"
#include "ressd/lattice/gso.hpp"
#include "ressd/lattice/heuristics.hpp"
#include "ressd/lattice/lll.hpp"
