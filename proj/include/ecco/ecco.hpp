#pragma once

#include "ecco/benchmark.hpp"
#include "ecco/compensated_sum.hpp"
#include "ecco/config_file.hpp"
#include "ecco/core_model.hpp"
#include "ecco/csv.hpp"
#include "ecco/energy_accounting.hpp"
#include "ecco/error.hpp"
#include "ecco/fork_join.hpp"
#include "ecco/master.hpp"
#include "ecco/quarter_car.hpp"
#include "ecco/reference.hpp"
#include "ecco/reproduce.hpp"
#include "ecco/step_control.hpp"
#include "ecco/unit_scaling.hpp"
