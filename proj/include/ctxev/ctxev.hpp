#pragma once

#include "ctxev/unl.hpp"
#include "ctxev/score.hpp"
#include "ctxev/segmenter.hpp"
#include "ctxev/clusterer.hpp"
#include "ctxev/event_model.hpp"
#include "ctxev/indexer.hpp"
#include "ctxev/ranker.hpp"
#include "ctxev/evaluator.hpp"
#include "ctxev/artifacts.hpp"
#include "ctxev/pipeline.hpp"
