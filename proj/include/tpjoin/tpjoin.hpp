#pragma once

#include "tpjoin/baseline_ta.hpp"
#include "tpjoin/bench.hpp"
#include "tpjoin/error.hpp"
#include "tpjoin/fuzz.hpp"
#include "tpjoin/instrument.hpp"
#include "tpjoin/joins.hpp"
#include "tpjoin/lineage.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/oracle.hpp"
#include "tpjoin/overlap.hpp"
#include "tpjoin/theta.hpp"
#include "tpjoin/windows.hpp"
