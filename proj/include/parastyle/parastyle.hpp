#pragma once

// Umbrella header.

#include "parastyle/audio.hpp"
#include "parastyle/cascade.hpp"
#include "parastyle/config.hpp"
#include "parastyle/core.hpp"
#include "parastyle/dataset.hpp"
#include "parastyle/error.hpp"
#include "parastyle/evaluate.hpp"
#include "parastyle/judges.hpp"
#include "parastyle/loudness.hpp"
#include "parastyle/metrics.hpp"
#include "parastyle/model.hpp"
#include "parastyle/orchestrator.hpp"
#include "parastyle/prompts.hpp"
#include "parastyle/remote.hpp"
#include "parastyle/report.hpp"
#include "parastyle/scripted.hpp"
#include "parastyle/store.hpp"
#include "parastyle/synth.hpp"
#include "parastyle/text.hpp"
