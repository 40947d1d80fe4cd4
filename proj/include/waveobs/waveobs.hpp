#pragma once

#include "waveobs/charsys.hpp"
#include "waveobs/csv.hpp"
#include "waveobs/domains.hpp"
#include "waveobs/errors.hpp"
#include "waveobs/expr.hpp"
#include "waveobs/fd.hpp"
#include "waveobs/field.hpp"
#include "waveobs/hypersolve.hpp"
#include "waveobs/observe.hpp"
#include "waveobs/obstime.hpp"
#include "waveobs/problem.hpp"
#include "waveobs/reconstruct.hpp"
