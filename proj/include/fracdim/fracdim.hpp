#pragma once

#include "fracdim/cell_set.hpp"
#include "fracdim/covering.hpp"
#include "fracdim/dimension.hpp"
#include "fracdim/error.hpp"
#include "fracdim/geometry.hpp"
#include "fracdim/grid_index.hpp"
#include "fracdim/io.hpp"
#include "fracdim/kd_tree.hpp"
#include "fracdim/parallel.hpp"
#include "fracdim/qc.hpp"
#include "fracdim/sample_set.hpp"
#include "fracdim/verify.hpp"
