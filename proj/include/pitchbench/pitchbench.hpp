/*
Copyright 2026 The pitchbench Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Umbrella header for the pitchbench toolkit.

#pragma once

#include "pitchbench/contour.hpp"
#include "pitchbench/corpus.hpp"
#include "pitchbench/error.hpp"
#include "pitchbench/fft.hpp"
#include "pitchbench/groundtruth.hpp"
#include "pitchbench/harness.hpp"
#include "pitchbench/kernels.hpp"
#include "pitchbench/manifest.hpp"
#include "pitchbench/metrics.hpp"
#include "pitchbench/optimizer.hpp"
#include "pitchbench/parallel.hpp"
#include "pitchbench/plots.hpp"
#include "pitchbench/postfilter.hpp"
#include "pitchbench/reverb.hpp"
#include "pitchbench/signal.hpp"
#include "pitchbench/synthvoice.hpp"
#include "pitchbench/trackers.hpp"
#include "pitchbench/wav.hpp"
