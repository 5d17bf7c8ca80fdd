#pragma once

#include "hicov/errors.hpp"
#include "hicov/linalg.hpp"
#include "hicov/normal_dist.hpp"
#include "hicov/rng.hpp"
#include "hicov/data_model.hpp"
#include "hicov/power_theory.hpp"
#include "hicov/statistics.hpp"
#include "hicov/harness.hpp"
#include "hicov/validation.hpp"
#include "hicov/io.hpp"
#include "hicov/campaign_config.hpp"
