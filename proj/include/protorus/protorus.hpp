#pragma once

#include "error.hpp"
#include "exact.hpp"
#include "intlat.hpp"
#include "torus.hpp"
#include "homk.hpp"
#include "prolimit.hpp"
#include "families.hpp"
#include "spectral.hpp"
