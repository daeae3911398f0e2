#ifndef GAPSCHED_GAPSCHED_HPP
#define GAPSCHED_GAPSCHED_HPP

#include "gapsched/model.hpp"
#include "gapsched/random.hpp"
#include "gapsched/power.hpp"
#include "gapsched/reliability.hpp"
#include "gapsched/slots.hpp"
#include "gapsched/gap.hpp"
#include "gapsched/baselines.hpp"
#include "gapsched/sim.hpp"
#include "gapsched/workload.hpp"
#include "gapsched/oracle.hpp"
#include "gapsched/io.hpp"
#include "gapsched/experiment.hpp"
#include "gapsched/verify.hpp"

#endif  // GAPSCHED_GAPSCHED_HPP
