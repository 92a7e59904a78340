#pragma once

#include "cmforge/aligner.hpp"
#include "cmforge/answerrank.hpp"
#include "cmforge/config.hpp"
#include "cmforge/corpus.hpp"
#include "cmforge/error.hpp"
#include "cmforge/lexres.hpp"
#include "cmforge/metrics.hpp"
#include "cmforge/mixer.hpp"
#include "cmforge/pipeline.hpp"
#include "cmforge/retrieval.hpp"
#include "cmforge/unicode.hpp"
