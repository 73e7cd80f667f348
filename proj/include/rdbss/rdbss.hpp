#pragma once

#include "rdbss/bsseval.hpp"
#include "rdbss/config.hpp"
#include "rdbss/dsp.hpp"
#include "rdbss/executor.hpp"
#include "rdbss/fractional_delay.hpp"
#include "rdbss/objective.hpp"
#include "rdbss/optimizer.hpp"
#include "rdbss/pipeline.hpp"
#include "rdbss/report.hpp"
#include "rdbss/rng.hpp"
#include "rdbss/roomsim.hpp"
#include "rdbss/sigma_probe.hpp"
#include "rdbss/signal.hpp"
#include "rdbss/stats.hpp"
#include "rdbss/suite.hpp"
#include "rdbss/synth.hpp"
#include "rdbss/test_functions.hpp"
#include "rdbss/unmixer.hpp"
#include "rdbss/wav.hpp"
