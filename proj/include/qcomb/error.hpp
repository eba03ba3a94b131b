// Copyright 2026 The qcomb Authors
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

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcomb {

/// Broad classes of failure, used by the command line front end to pick an
/// exit code.
enum class ErrorCategory {
  Validation,  // well-formed object violating a mathematical contract
  Input,       // malformed input, unknown files, bad arguments
  Numerical,   // solver did not converge or a numerical rank test failed
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what,
                 ErrorCategory category = ErrorCategory::Validation)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define QCOMB_DEFINE_ERROR(Name, Category)                 \
  class Name : public Error {                              \
   public:                                                 \
    explicit Name(const std::string& what)                 \
        : Error(#Name ": " + what, ErrorCategory::Category) {} \
  }

QCOMB_DEFINE_ERROR(DimMismatch, Validation);
QCOMB_DEFINE_ERROR(OverlappingLabels, Validation);
QCOMB_DEFINE_ERROR(UnknownLabel, Validation);
QCOMB_DEFINE_ERROR(ShapeMismatch, Validation);
QCOMB_DEFINE_ERROR(SpaceMismatch, Validation);
QCOMB_DEFINE_ERROR(NotPermutation, Validation);
QCOMB_DEFINE_ERROR(LabelUsedThrice, Validation);
QCOMB_DEFINE_ERROR(NotCP, Validation);
QCOMB_DEFINE_ERROR(NotPSD, Validation);
QCOMB_DEFINE_ERROR(InvalidComb, Validation);
QCOMB_DEFINE_ERROR(NotDeterministicComb, Validation);
QCOMB_DEFINE_ERROR(SumNotDeterministic, Validation);
QCOMB_DEFINE_ERROR(InvalidInterleaving, Validation);
QCOMB_DEFINE_ERROR(NonAdjacentMerge, Validation);
QCOMB_DEFINE_ERROR(InvalidTester, Validation);
QCOMB_DEFINE_ERROR(BaseNotComplete, Validation);
QCOMB_DEFINE_ERROR(ThetaSingular, Validation);
QCOMB_DEFINE_ERROR(PostSelectionImpossible, Validation);
QCOMB_DEFINE_ERROR(WireError, Validation);
QCOMB_DEFINE_ERROR(ParseError, Input);
QCOMB_DEFINE_ERROR(InvalidArgument, Input);
QCOMB_DEFINE_ERROR(NumericalRankFailure, Numerical);
QCOMB_DEFINE_ERROR(FeasibilitySolverFailure, Numerical);
QCOMB_DEFINE_ERROR(ConvergenceFailure, Numerical);

#undef QCOMB_DEFINE_ERROR

/// Raised when a comb fails one level of the normalization hierarchy.
/// `level` is the index j of the reduced comb S^(j) whose condition failed.
class LevelViolation : public Error {
 public:
  LevelViolation(std::size_t level, double residual)
      : Error("LevelViolation j=" + std::to_string(level) +
              " residual=" + format_residual(residual)),
        level_(level),
        residual_(residual) {}

  std::size_t level() const noexcept { return level_; }
  double residual() const noexcept { return residual_; }

 private:
  static std::string format_residual(double r) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", r);
    return buf;
  }

  std::size_t level_;
  double residual_;
};

/// Raised by graph validation; `path` lists node ids along one cycle.
class CycleFound : public Error {
 public:
  explicit CycleFound(std::vector<std::string> path)
      : Error("CycleFound: " + join(path)), path_(std::move(path)) {}

  const std::vector<std::string>& path() const noexcept { return path_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) s += " -> ";
      s += p[i];
    }
    return s;
  }

  std::vector<std::string> path_;
};

}  // namespace qcomb
