#pragma once

#include "qsim/errors.hpp"
#include "qsim/frame_rep.hpp"
#include "qsim/io.hpp"
#include "qsim/nebit.hpp"
#include "qsim/protocol.hpp"
#include "qsim/quantum_oracle.hpp"
#include "qsim/rng.hpp"
#include "qsim/stats_costs.hpp"
