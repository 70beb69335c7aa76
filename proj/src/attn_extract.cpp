// Copyright 2026 The mpa-eval Authors.
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

#include <exception>

#include "mpa/attn.hpp"

namespace mpa::attn {

std::vector<HeadMatrix> extract_serial(const Dump& dump, std::span<const ExtractJob> jobs,
                                       Kind kind) {
  std::vector<HeadMatrix> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs)
    out.push_back(cue_target_weight(dump.load(job.record, kind), job.query, job.key));
  return out;
}

std::vector<HeadMatrix> extract_parallel(const Dump& dump, std::span<const ExtractJob> jobs,
                                         Kind kind) {
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  std::vector<HeadMatrix> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto& job = jobs[i];
      out[i] = cue_target_weight(dump.load(job.record, kind), job.query, job.key);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mpa::attn
