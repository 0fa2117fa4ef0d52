#pragma once

#include "infodim/binned.hpp"
#include "infodim/catalog.hpp"
#include "infodim/common.hpp"
#include "infodim/complexity.hpp"
#include "infodim/info_measures.hpp"
#include "infodim/io.hpp"
#include "infodim/multifractal.hpp"
#include "infodim/prob_dist.hpp"
#include "infodim/runner.hpp"
#include "infodim/simplex.hpp"
