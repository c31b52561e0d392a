/// Umbrella header.
#pragma once

#include "folhol/bch.hpp"
#include "folhol/dsl.hpp"
#include "folhol/flow.hpp"
#include "folhol/foliation.hpp"
#include "folhol/holonomy.hpp"
#include "folhol/module_groebner.hpp"
#include "folhol/pointwise.hpp"
#include "folhol/poly_vector.hpp"
#include "folhol/polynomial.hpp"
#include "folhol/rational.hpp"
#include "folhol/rational_linalg.hpp"
#include "folhol/report.hpp"
#include "folhol/version.hpp"
