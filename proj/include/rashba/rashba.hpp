#pragma once

#include "rashba/aligned.hpp"
#include "rashba/array.hpp"
#include "rashba/fft.hpp"
#include "rashba/grid.hpp"
#include "rashba/kinetic.hpp"
#include "rashba/moyal.hpp"
#include "rashba/pauli.hpp"
#include "rashba/potential.hpp"
#include "rashba/qdd.hpp"
#include "rashba/runner.hpp"
#include "rashba/scenario.hpp"
#include "rashba/snapshot.hpp"
#include "rashba/spectral.hpp"
#include "rashba/suites.hpp"
#include "rashba/validation.hpp"
