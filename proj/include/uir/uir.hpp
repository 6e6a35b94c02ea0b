#pragma once

#include "uir/data_model.hpp"
#include "uir/error.hpp"
#include "uir/experiments.hpp"
#include "uir/metrics.hpp"
#include "uir/report.hpp"
#include "uir/stats.hpp"
#include "uir/unanimous.hpp"
