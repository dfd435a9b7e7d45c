#pragma once

#include "oxg/baseline.hpp"
#include "oxg/datasets.hpp"
#include "oxg/errors.hpp"
#include "oxg/family.hpp"
#include "oxg/gof.hpp"
#include "oxg/mle.hpp"
#include "oxg/numeric.hpp"
#include "oxg/quadrature.hpp"
#include "oxg/series.hpp"
