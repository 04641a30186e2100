#pragma once

#include "bifree/bifreeconv.hpp"
#include "bifree/cfree.hpp"
#include "bifree/errors.hpp"
#include "bifree/freeconv.hpp"
#include "bifree/io.hpp"
#include "bifree/measure.hpp"
#include "bifree/oracle.hpp"
#include "bifree/semigroup.hpp"
#include "bifree/series.hpp"
#include "bifree/solver.hpp"
