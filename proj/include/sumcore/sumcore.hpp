#pragma once

#include "sumcore/common.hpp"
#include "sumcore/core_engine.hpp"
#include "sumcore/densest.hpp"
#include "sumcore/engagement.hpp"
#include "sumcore/graph.hpp"
#include "sumcore/summarizer.hpp"
#include "sumcore/wfirmcore.hpp"
