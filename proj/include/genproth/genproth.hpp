#pragma once

#include <genproth/arith.hpp>
#include <genproth/bench.hpp>
#include <genproth/census.hpp>
#include <genproth/factor.hpp>
#include <genproth/forms.hpp>
#include <genproth/oracle.hpp>
#include <genproth/primality.hpp>
#include <genproth/records.hpp>
#include <genproth/verdict.hpp>
