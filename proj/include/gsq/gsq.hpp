#pragma once

#include "gsq/errors.hpp"
#include "gsq/specfun.hpp"
#include "gsq/quadrature.hpp"
#include "gsq/parallel.hpp"
#include "gsq/fockspace.hpp"
#include "gsq/eigenstates.hpp"
#include "gsq/momentum3.hpp"
#include "gsq/io.hpp"
