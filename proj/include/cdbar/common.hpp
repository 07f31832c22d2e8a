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

#ifndef CDBAR_COMMON_HPP_
#define CDBAR_COMMON_HPP_

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cdbar {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

enum class ErrorCode {
  kInvalidParameter,
  kCornerSingularity,
  kParameterProblemFailure,
  kInversionFailure,
  kInvalidComposition,
  kIndexError,
  kAssemblyFailure,
  kIllConditionedInversion,
  kTransmissionSolveFailure,
  kInvalidCurrent,
  kInvalidGeometry,
  kBranchCut,
  kSingularArgument,
  kSingularParameter,
  kAutoTruncationFailure,
  kInvalidRegion,
  kInvalidScale,
  kInvalidConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported with this exception type; `code()` is
// stable and is what the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Worker count used when callers pass jobs <= 0.
int default_jobs();
void set_default_jobs(int jobs);

// Runs body(i) for i in [0, n). Iterations must be independent; results are
// then identical for any job count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int jobs = 0);

}  // namespace cdbar

#endif  // CDBAR_COMMON_HPP_
