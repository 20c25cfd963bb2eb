// Copyright 2026 The QGC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qgc/backend.hpp"
#include "qgc/controlled_test.hpp"
#include "qgc/corpus.hpp"
#include "qgc/corpus_io.hpp"
#include "qgc/error.hpp"
#include "qgc/evaluation.hpp"
#include "qgc/external_scorer.hpp"
#include "qgc/labels.hpp"
#include "qgc/metrics.hpp"
#include "qgc/pipeline.hpp"
#include "qgc/promptspec.hpp"
#include "qgc/report.hpp"
