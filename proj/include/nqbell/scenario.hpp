#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nqbell {

/// Raised for any violation of a documented precondition on domain objects.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global float tolerance for numeric-mode comparisons (default 1e-9).
double numeric_tolerance() noexcept;
void set_numeric_tolerance(double tol);

/// Party count with per-party input and output cardinalities.
///
/// Input and outcome tuples are packed into mixed-radix integers, party 0 most
/// significant. A table entry for (x, a) lives at x * outcome_count() + a.
class Scenario {
 public:
  Scenario(std::vector<int> inputs, std::vector<int> outputs);
  static Scenario uniform(int parties, int inputs, int outputs);

  [[nodiscard]] int parties() const noexcept { return static_cast<int>(inputs_.size()); }
  [[nodiscard]] int inputs(int party) const { return inputs_.at(static_cast<std::size_t>(party)); }
  [[nodiscard]] int outputs(int party) const { return outputs_.at(static_cast<std::size_t>(party)); }
  [[nodiscard]] const std::vector<int>& input_sizes() const noexcept { return inputs_; }
  [[nodiscard]] const std::vector<int>& output_sizes() const noexcept { return outputs_; }

  [[nodiscard]] std::size_t input_count() const noexcept { return input_count_; }
  [[nodiscard]] std::size_t outcome_count() const noexcept { return outcome_count_; }
  [[nodiscard]] std::size_t table_size() const noexcept { return input_count_ * outcome_count_; }
  [[nodiscard]] std::size_t entry(std::size_t x, std::size_t a) const noexcept { return x * outcome_count_ + a; }

  [[nodiscard]] std::size_t encode_inputs(std::span<const int> x) const;
  [[nodiscard]] std::size_t encode_outcomes(std::span<const int> a) const;
  [[nodiscard]] std::vector<int> decode_inputs(std::size_t x) const;
  [[nodiscard]] std::vector<int> decode_outcomes(std::size_t a) const;
  /// Digit of one party inside a packed input / outcome index.
  [[nodiscard]] int input_of(std::size_t x, int party) const noexcept;
  [[nodiscard]] int outcome_of(std::size_t a, int party) const noexcept;

  /// Same scenario with one party dropped.
  [[nodiscard]] Scenario without_party(int party) const;
  [[nodiscard]] bool is_binary() const noexcept;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const Scenario& a, const Scenario& b) noexcept {
    return a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_;
  }

 private:
  std::vector<int> inputs_;
  std::vector<int> outputs_;
  std::vector<std::size_t> input_stride_;
  std::vector<std::size_t> output_stride_;
  std::size_t input_count_ = 1;
  std::size_t outcome_count_ = 1;
};

}  // namespace nqbell
