// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace projlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A basis whose numerical rank is below its length.
class RankError : public Error {
 public:
  using Error::Error;
};

// Range and kernel that do not form a direct sum of the whole space.
class ComplementError : public Error {
 public:
  using Error::Error;
};

// A candidate intersection projector that does not satisfy Q P_j = Q for the
// listed (0-based) indices.
class CompatibilityError : public Error {
 public:
  CompatibilityError(std::string what, std::vector<std::size_t> indices, double residual)
      : Error(std::move(what)), indices_(std::move(indices)), residual_(residual) {}

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<std::size_t> indices_;
  double residual_;
};

// A bound or criterion whose preconditions do not hold (cosine >= 1, beta
// out of range, non-contractive envelope).
class InapplicableError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  ScheduleError(std::string what, std::size_t window_start)
      : Error(std::move(what)), window_start_(window_start) {}
  // 0-based index of the first window that misses a symbol.
  std::size_t window_start() const noexcept { return window_start_; }

 private:
  std::size_t window_start_;
};

// Product norm blow-up or an iteration that never settles.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string what, std::size_t step) : Error(std::move(what)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace projlab
