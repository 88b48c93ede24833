#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nqbell/rational.hpp"
#include "nqbell/scenario.hpp"

namespace nqbell {

enum class BoxMode { exact, numeric };

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rat> {
  static constexpr BoxMode mode = BoxMode::exact;
  static bool nonnegative(const Rat& v) { return v.sign() >= 0; }
  static bool same(const Rat& a, const Rat& b) { return a == b; }
  static Rat one() { return Rat(1); }
};

template <>
struct ScalarTraits<double> {
  static constexpr BoxMode mode = BoxMode::numeric;
  static bool nonnegative(double v) { return v >= -numeric_tolerance(); }
  static bool same(double a, double b) { return std::abs(a - b) <= numeric_tolerance(); }
  static double one() { return 1.0; }
};

/// Conditional probability table P(a|x) over a scenario.
template <class T>
class BasicBox {
 public:
  using value_type = T;

  BasicBox(Scenario scenario, std::vector<T> table) : scenario_(std::move(scenario)), table_(std::move(table)) {
    if (table_.size() != scenario_.table_size()) throw DomainError("box table has wrong size");
    const std::size_t outs = scenario_.outcome_count();
    for (std::size_t x = 0; x < scenario_.input_count(); ++x) {
      T sum{};
      for (std::size_t a = 0; a < outs; ++a) {
        const T& p = table_[x * outs + a];
        if (!ScalarTraits<T>::nonnegative(p)) throw DomainError("box has a negative entry");
        sum += p;
      }
      if (!ScalarTraits<T>::same(sum, ScalarTraits<T>::one())) {
        throw DomainError("box row " + std::to_string(x) + " is not normalized");
      }
    }
  }

  static constexpr BoxMode mode() noexcept { return ScalarTraits<T>::mode; }
  [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
  [[nodiscard]] const T& operator()(std::size_t x, std::size_t a) const { return table_[scenario_.entry(x, a)]; }
  [[nodiscard]] const T& at(std::size_t entry) const { return table_.at(entry); }
  [[nodiscard]] std::span<const T> table() const noexcept { return table_; }

 private:
  Scenario scenario_;
  std::vector<T> table_;
};

using Box = BasicBox<Rat>;
using NumericBox = BasicBox<double>;

NumericBox to_numeric(const Box& box);

/// Probability q(x) over packed input indices.
class InputDistribution {
 public:
  InputDistribution(Scenario scenario, std::vector<Rat> q);
  [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
  [[nodiscard]] const std::vector<Rat>& weights() const noexcept { return q_; }
  [[nodiscard]] const Rat& operator()(std::size_t x) const { return q_.at(x); }

 private:
  Scenario scenario_;
  std::vector<Rat> q_;
};

/// One response function per party: responses[party][input] = outcome.
struct DeterministicStrategy {
  std::vector<std::vector<int>> responses;
  friend bool operator==(const DeterministicStrategy&, const DeterministicStrategy&) = default;
};

inline constexpr std::size_t kDefaultVertexCap = 10'000'000;

/// prod_i d_i^{m_i}; throws when it exceeds cap.
std::size_t strategy_count(const Scenario& s, std::size_t cap = kDefaultVertexCap);
/// Strategy with the given rank in lexicographic order of the flattened
/// response table (party 0, input 0 most significant).
DeterministicStrategy strategy_at(const Scenario& s, std::size_t index);
std::size_t strategy_index(const Scenario& s, const DeterministicStrategy& st);
std::vector<DeterministicStrategy> enumerate_deterministic_strategies(const Scenario& s,
                                                                     std::size_t cap = kDefaultVertexCap);
void validate_strategy(const Scenario& s, const DeterministicStrategy& st);
Box box_from_strategy(const Scenario& s, const DeterministicStrategy& st);

struct BellTerm {
  std::size_t x = 0;
  std::size_t a = 0;
  Rat coefficient;
};

/// Sparse linear functional over P(a|x) with optional known local bound.
class BellExpression {
 public:
  /// Duplicate (x, a) keys are summed; zero coefficients are dropped.
  BellExpression(Scenario scenario, std::vector<BellTerm> terms, std::optional<Rat> classical_bound = std::nullopt,
                 std::string label = {});

  [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
  [[nodiscard]] const std::vector<BellTerm>& terms() const noexcept { return terms_; }
  [[nodiscard]] const std::optional<Rat>& classical_bound() const noexcept { return bound_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }

  [[nodiscard]] BellExpression with_bound(std::optional<Rat> bound) const;
  [[nodiscard]] BellExpression with_label(std::string label) const;
  /// Same functional on a scenario with at least as many inputs and outputs per party.
  [[nodiscard]] BellExpression embedded(const Scenario& larger) const;
  [[nodiscard]] Rat coefficient(std::size_t x, std::size_t a) const;

 private:
  Scenario scenario_;
  std::vector<BellTerm> terms_;
  std::optional<Rat> bound_;
  std::string label_;
};

/// Term from explicit outcome and input tuples, written P(a|x).
BellTerm make_term(const Scenario& s, std::span<const int> outcomes, std::span<const int> inputs, Rat coefficient);

Rat bell_value(const BellExpression& e, const Box& b);
double bell_value(const BellExpression& e, const NumericBox& b);
/// Value on a deterministic vertex, without materialising the box.
Rat bell_value(const BellExpression& e, const DeterministicStrategy& st);

struct SignalingViolation {
  int party = 0;
  std::size_t context = 0;       ///< input index with the party's digit set to 0
  std::size_t rest_outcome = 0;  ///< outcome index with the party's digit set to 0
  int input = 0;
  int other_input = 0;
};

struct NonsignalingReport {
  bool nonsignaling = true;
  std::vector<SignalingViolation> violations;
  explicit operator bool() const noexcept { return nonsignaling; }
};

template <class T>
NonsignalingReport is_nonsignaling(const BasicBox<T>& b);

/// Conditions the box on one party's outcome for a fixed input and removes that party.
template <class T>
BasicBox<T> postselect(const BasicBox<T>& b, int party, int input, int outcome);

/// Adds a party that deterministically echoes its binary input.
template <class T>
BasicBox<T> lift_box(const BasicBox<T>& b);

/// Marginal on the kept parties; dropped parties' inputs are pinned to fixed_inputs
/// (all zero when empty), which is immaterial for no-signaling boxes.
template <class T>
BasicBox<T> marginal(const BasicBox<T>& b, std::span<const int> keep, std::span<const int> fixed_inputs = {});

}  // namespace nqbell
