/*
 * Copyright 2026 The stargraph Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "stargraph/answers.hpp"
#include "stargraph/decompose.hpp"
#include "stargraph/embedding.hpp"
#include "stargraph/error.hpp"
#include "stargraph/eval.hpp"
#include "stargraph/generate.hpp"
#include "stargraph/mapreduce.hpp"
#include "stargraph/ntriples.hpp"
#include "stargraph/oracle.hpp"
#include "stargraph/partition.hpp"
#include "stargraph/plan.hpp"
#include "stargraph/rdf.hpp"
#include "stargraph/rng.hpp"
#include "stargraph/segments.hpp"
