// Copyright 2026 The conformal-dbar Authors. All Rights Reserved.
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

#include "cdbar/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cdbar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kCornerSingularity: return "corner-singularity";
    case ErrorCode::kParameterProblemFailure: return "parameter-problem-failure";
    case ErrorCode::kInversionFailure: return "inversion-failure";
    case ErrorCode::kInvalidComposition: return "invalid-composition";
    case ErrorCode::kIndexError: return "index-error";
    case ErrorCode::kAssemblyFailure: return "assembly-failure";
    case ErrorCode::kIllConditionedInversion: return "ill-conditioned-inversion";
    case ErrorCode::kTransmissionSolveFailure: return "transmission-solve-failure";
    case ErrorCode::kInvalidCurrent: return "invalid-current";
    case ErrorCode::kInvalidGeometry: return "invalid-geometry";
    case ErrorCode::kBranchCut: return "branch-cut";
    case ErrorCode::kSingularArgument: return "singular-argument";
    case ErrorCode::kSingularParameter: return "singular-parameter";
    case ErrorCode::kAutoTruncationFailure: return "auto-truncation-failure";
    case ErrorCode::kInvalidRegion: return "invalid-region";
    case ErrorCode::kInvalidScale: return "invalid-scale";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

namespace {
std::atomic<int> g_default_jobs{0};
}

int default_jobs() {
  const int configured = g_default_jobs.load();
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_jobs(int jobs) { g_default_jobs.store(jobs); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int jobs) {
  if (jobs <= 0) jobs = default_jobs();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cdbar
