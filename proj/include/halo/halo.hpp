#pragma once

#include "halo/error.hpp"
#include "halo/params.hpp"
#include "halo/dopri5.hpp"
#include "halo/model.hpp"
#include "halo/parallel.hpp"
#include "halo/response.hpp"
#include "halo/value_space.hpp"
#include "halo/regulator.hpp"
#include "halo/database_io.hpp"
#include "halo/svg.hpp"
