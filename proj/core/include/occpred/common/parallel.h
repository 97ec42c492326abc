/*
 * Copyright 2026 The occpred Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OCCPRED_COMMON_PARALLEL_H_
#define OCCPRED_COMMON_PARALLEL_H_

#include <cstdint>

namespace occpred {

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs; any
// reduction happens afterwards in index order, so results never depend on the
// thread schedule.
template <typename Body>
void ParallelFor(std::int64_t n, Body&& body) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
#else
  for (std::int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace occpred

#endif  // OCCPRED_COMMON_PARALLEL_H_
