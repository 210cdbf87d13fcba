/*
 * Copyright 2026 The astrid-cpp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "astrid/classifiers.hpp"
#include "astrid/dataset.hpp"
#include "astrid/error.hpp"
#include "astrid/evaluation.hpp"
#include "astrid/ingest.hpp"
#include "astrid/parallel.hpp"
#include "astrid/permutation.hpp"
#include "astrid/report.hpp"
#include "astrid/rng.hpp"
#include "astrid/search.hpp"
