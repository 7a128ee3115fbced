#pragma once

#include "suslov/core.hpp"
#include "suslov/critical.hpp"
#include "suslov/dynamics.hpp"
#include "suslov/levelset.hpp"
#include "suslov/projection.hpp"
#include "suslov/svg.hpp"
