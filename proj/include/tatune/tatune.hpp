#pragma once

#include "tatune/benchgen.hpp"
#include "tatune/bound.hpp"
#include "tatune/dbm.hpp"
#include "tatune/engine.hpp"
#include "tatune/error.hpp"
#include "tatune/lattice.hpp"
#include "tatune/model.hpp"
#include "tatune/model_io.hpp"
#include "tatune/relax.hpp"
#include "tatune/sat.hpp"
#include "tatune/symstore.hpp"
#include "tatune/verifier.hpp"
