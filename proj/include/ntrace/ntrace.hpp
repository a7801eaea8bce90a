#pragma once

#include "ntrace/baseline.hpp"
#include "ntrace/bench.hpp"
#include "ntrace/bitkey.hpp"
#include "ntrace/graph.hpp"
#include "ntrace/io.hpp"
#include "ntrace/ordering.hpp"
#include "ntrace/query.hpp"
#include "ntrace/report.hpp"
#include "ntrace/trace_index.hpp"
