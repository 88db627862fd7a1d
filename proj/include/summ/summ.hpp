#pragma once

#include "summ/diagnostics.hpp"
#include "summ/driver.hpp"
#include "summ/io/config.hpp"
#include "summ/io/dataset.hpp"
#include "summ/io/idx.hpp"
#include "summ/io/metrics.hpp"
#include "summ/mlp.hpp"
#include "summ/momentum.hpp"
#include "summ/problems.hpp"
#include "summ/schedule.hpp"
#include "summ/trajectory.hpp"
