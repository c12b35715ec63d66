#pragma once

// Everything except the HTTP binding (kst/http_service.hpp).

#include "kst/assessment.hpp"
#include "kst/base_surmise.hpp"
#include "kst/builder.hpp"
#include "kst/domain.hpp"
#include "kst/error.hpp"
#include "kst/family.hpp"
#include "kst/io.hpp"
#include "kst/probabilistic.hpp"
#include "kst/projection.hpp"
#include "kst/random.hpp"
#include "kst/service.hpp"
#include "kst/state.hpp"
#include "kst/strings.hpp"
#include "kst/structures.hpp"
