#pragma once

#include "oiltrade/analysis.hpp"
#include "oiltrade/attack.hpp"
#include "oiltrade/centrality.hpp"
#include "oiltrade/community.hpp"
#include "oiltrade/graph.hpp"
#include "oiltrade/indicators.hpp"
#include "oiltrade/scores.hpp"
#include "oiltrade/trade_ingest.hpp"
