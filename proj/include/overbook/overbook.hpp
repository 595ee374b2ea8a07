#pragma once

#include "overbook/distributions.hpp"
#include "overbook/error.hpp"
#include "overbook/json_io.hpp"
#include "overbook/mechanisms.hpp"
#include "overbook/offline_oracle.hpp"
#include "overbook/prophet_algs.hpp"
#include "overbook/random.hpp"
#include "overbook/secretary_algs.hpp"
#include "overbook/stats.hpp"
#include "overbook/trials.hpp"
#include "overbook/harness/experiment.hpp"
#include "overbook/harness/report.hpp"
#include "overbook/harness/spec.hpp"
