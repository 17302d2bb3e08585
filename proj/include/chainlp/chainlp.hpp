#pragma once

#include "chainlp/error.hpp"
#include "chainlp/model.hpp"
#include "chainlp/range_add.hpp"
#include "chainlp/greedy_solver.hpp"
#include "chainlp/fast_solver.hpp"
#include "chainlp/reduction.hpp"
#include "chainlp/proportional.hpp"
