#pragma once

#include "qtss/adversary.hpp"
#include "qtss/core.hpp"
#include "qtss/engine.hpp"
#include "qtss/protocol_math.hpp"
#include "qtss/report.hpp"
