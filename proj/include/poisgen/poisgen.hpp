#pragma once

#include "poisgen/algebra.hpp"
#include "poisgen/census.hpp"
#include "poisgen/endv.hpp"
#include "poisgen/errors.hpp"
#include "poisgen/io.hpp"
#include "poisgen/scalar.hpp"
#include "poisgen/taxonomy.hpp"
