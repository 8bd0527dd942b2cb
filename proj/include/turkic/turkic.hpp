#pragma once

#include "turkic/errors.hpp"
#include "turkic/fitting.hpp"
#include "turkic/forgetting.hpp"
#include "turkic/io.hpp"
#include "turkic/planner.hpp"
#include "turkic/profiles.hpp"
#include "turkic/scaling.hpp"
#include "turkic/transfer.hpp"
#include "turkic/ttc.hpp"
