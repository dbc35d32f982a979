#pragma once

#include <shiftreg/core.hpp>
#include <shiftreg/shift.hpp>
#include <shiftreg/unbounded.hpp>
#include <shiftreg/baseline.hpp>
#include <shiftreg/problems.hpp>
#include <shiftreg/csv.hpp>
#include <shiftreg/experiment.hpp>
#include <shiftreg/verify.hpp>
