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

#include <string>
#include <string_view>
#include <vector>

#include "stargraph/eval_common.hpp"
#include "stargraph/eval_qejpe.hpp"
#include "stargraph/eval_redundancy.hpp"
#include "stargraph/eval_stars.hpp"

namespace stargraph {

inline const std::vector<std::string_view>& evaluation_algorithms() {
  static const std::vector<std::string_view> names{"qejpe", "stars", "redundancy"};
  return names;
}

inline EvalResult evaluate(std::string_view algorithm, const SegmentSet& segs, const QueryPlan& plan,
                           const EvalOptions& opts) {
  if (algorithm == "qejpe") return run_qejpe(segs, plan, opts);
  if (algorithm == "stars") return run_stars(segs, plan, opts);
  if (algorithm == "redundancy") return run_redundancy(segs, plan, opts);
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm: " + std::string(algorithm));
}

inline EvalResult evaluate(std::string_view algorithm, const SegmentSet& segs, const QueryGraph& q,
                           const QueryDecomposition& d, const EvalOptions& opts) {
  return evaluate(algorithm, segs, preprocess(q, d), opts);
}

}  // namespace stargraph
