// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header for the whole library.

#pragma once

#include "newsreel/align/align.hpp"
#include "newsreel/chaptering/baselines.hpp"
#include "newsreel/chaptering/distance.hpp"
#include "newsreel/chaptering/segment.hpp"
#include "newsreel/chaptering/sweep.hpp"
#include "newsreel/config/run_config.hpp"
#include "newsreel/core/timeline.hpp"
#include "newsreel/csv.hpp"
#include "newsreel/error.hpp"
#include "newsreel/eval/metrics.hpp"
#include "newsreel/fusion/checkpoint.hpp"
#include "newsreel/fusion/loss.hpp"
#include "newsreel/fusion/model.hpp"
#include "newsreel/fusion/optimizer.hpp"
#include "newsreel/fusion/tape.hpp"
#include "newsreel/fusion/train.hpp"
#include "newsreel/ingest/embedding_store.hpp"
#include "newsreel/ingest/formats.hpp"
#include "newsreel/ingest/split.hpp"
#include "newsreel/ingest/synthetic.hpp"
#include "newsreel/ingest/video_record.hpp"
#include "newsreel/media/audio_io.hpp"
#include "newsreel/media/fft.hpp"
#include "newsreel/media/mfcc.hpp"
#include "newsreel/media/shot_detector.hpp"
#include "newsreel/parallel.hpp"
#include "newsreel/random.hpp"
#include "newsreel/tensor.hpp"
