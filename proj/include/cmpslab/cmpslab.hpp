#pragma once

#include "cmpslab/errors.hpp"
#include "cmpslab/linalg.hpp"
#include "cmpslab/lattice_mps.hpp"
#include "cmpslab/cmps_core.hpp"
#include "cmpslab/field_types.hpp"
#include "cmpslab/coherent_path.hpp"
#include "cmpslab/field_states.hpp"
#include "cmpslab/dynamics.hpp"
#include "cmpslab/io.hpp"
#include "cmpslab/random.hpp"
