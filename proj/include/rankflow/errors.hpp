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

#ifndef RANKFLOW_ERRORS_HPP_
#define RANKFLOW_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rankflow {

// Exit-code classes used by the CLI. Library code throws; the CLI maps.
enum class ErrorKind {
  kSchema = 2,        // malformed configuration
  kPrecondition = 3,  // valid config, inadmissible parameters or inputs
  kNumerical = 4,     // solver failure, overflow, budget exhaustion
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error(ErrorKind::kSchema, what + " (at " + pointer + ")"),
        pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::kPrecondition, what) {}
};

class ParametersOutsideSigma : public PreconditionError {
 public:
  ParametersOutsideSigma(double a, double b)
      : PreconditionError("(a, b) = (" + std::to_string(a) + ", " +
                          std::to_string(b) +
                          ") lies outside the admissible rate region") {}
};

class AssumptionViolated : public PreconditionError {
 public:
  AssumptionViolated(int window_lo, int window_hi, int failing_index)
      : PreconditionError("window [" + std::to_string(window_lo) + ", " +
                          std::to_string(window_hi) +
                          "] has a nonpositive rate at k = " +
                          std::to_string(failing_index)),
        window_lo_(window_lo),
        window_hi_(window_hi),
        failing_index_(failing_index) {}
  int window_lo() const { return window_lo_; }
  int window_hi() const { return window_hi_; }
  int failing_index() const { return failing_index_; }

 private:
  int window_lo_;
  int window_hi_;
  int failing_index_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

class SkorokhodNonconvergence : public NumericalError {
 public:
  SkorokhodNonconvergence(std::size_t step, double residual)
      : NumericalError("reflection solve did not reach tolerance at step " +
                       std::to_string(step) +
                       ", residual = " + std::to_string(residual)) {}
};

class ExhaustedTailBudget : public NumericalError {
 public:
  explicit ExhaustedTailBudget(std::size_t budget)
      : NumericalError("absorption count exceeded the configured budget of " +
                       std::to_string(budget)) {}
};

}  // namespace rankflow

#endif  // RANKFLOW_ERRORS_HPP_
