#pragma once

// Everything except model_io.hpp, which pulls in nlohmann_json.

#include "posctl/error.hpp"
#include "posctl/linalg.hpp"
#include "posctl/lp.hpp"
#include "posctl/stability.hpp"
#include "posctl/performance.hpp"
#include "posctl/synthesis.hpp"
#include "posctl/polynomial.hpp"
#include "posctl/posdom.hpp"
#include "posctl/eigen_cuts.hpp"
#include "posctl/pqp.hpp"
#include "posctl/kyp.hpp"
#include "posctl/distributed.hpp"
#include "posctl/demos.hpp"
