#pragma once

// Umbrella header.

#include "bivexp/airy.hpp"
#include "bivexp/expr.hpp"
#include "bivexp/grid.hpp"
#include "bivexp/io.hpp"
#include "bivexp/linear2.hpp"
#include "bivexp/mat2.hpp"
#include "bivexp/matpath.hpp"
#include "bivexp/miura.hpp"
#include "bivexp/riccati.hpp"
#include "bivexp/rk.hpp"
#include "bivexp/schrodinger.hpp"
#include "bivexp/series.hpp"
#include "bivexp/sphere.hpp"
#include "bivexp/version.hpp"
