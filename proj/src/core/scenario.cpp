#include "nqbell/scenario.hpp"

#include <atomic>
#include <sstream>

namespace nqbell {

namespace {

std::atomic<double> g_tolerance{1e-9};

// Tables beyond 2^40 entries are never materialised; fail early instead of
// overflowing later index arithmetic.
constexpr std::size_t kMaxTable = std::size_t{1} << 40;

std::size_t checked_product(const std::vector<int>& sizes, const char* what) {
  std::size_t total = 1;
  for (int s : sizes) {
    std::size_t next = 0;
    if (__builtin_mul_overflow(total, static_cast<std::size_t>(s), &next) || next > kMaxTable) {
      throw DomainError(std::string("scenario too large: ") + what + " count overflows");
    }
    total = next;
  }
  return total;
}

}  // namespace

double numeric_tolerance() noexcept { return g_tolerance.load(std::memory_order_relaxed); }

void set_numeric_tolerance(double tol) {
  if (!(tol > 0.0)) throw DomainError("numeric tolerance must be positive");
  g_tolerance.store(tol, std::memory_order_relaxed);
}

Scenario::Scenario(std::vector<int> inputs, std::vector<int> outputs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (inputs_.empty()) throw DomainError("scenario needs at least one party");
  if (inputs_.size() != outputs_.size()) throw DomainError("inputs and outputs must list the same parties");
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (inputs_[i] < 1 || outputs_[i] < 1) throw DomainError("cardinalities must be >= 1");
  }
  input_count_ = checked_product(inputs_, "input");
  outcome_count_ = checked_product(outputs_, "outcome");
  std::size_t total = 0;
  if (__builtin_mul_overflow(input_count_, outcome_count_, &total) || total > kMaxTable) {
    throw DomainError("scenario too large: table size overflows");
  }
  const std::size_t n = inputs_.size();
  input_stride_.assign(n, 1);
  output_stride_.assign(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) {
    input_stride_[i] = input_stride_[i + 1] * static_cast<std::size_t>(inputs_[i + 1]);
    output_stride_[i] = output_stride_[i + 1] * static_cast<std::size_t>(outputs_[i + 1]);
  }
}

Scenario Scenario::uniform(int parties, int inputs, int outputs) {
  if (parties < 1) throw DomainError("scenario needs at least one party");
  return Scenario(std::vector<int>(static_cast<std::size_t>(parties), inputs),
                  std::vector<int>(static_cast<std::size_t>(parties), outputs));
}

std::size_t Scenario::encode_inputs(std::span<const int> x) const {
  if (x.size() != inputs_.size()) throw DomainError("input tuple has wrong length");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= inputs_[i]) throw DomainError("input out of range");
    idx += static_cast<std::size_t>(x[i]) * input_stride_[i];
  }
  return idx;
}

std::size_t Scenario::encode_outcomes(std::span<const int> a) const {
  if (a.size() != outputs_.size()) throw DomainError("outcome tuple has wrong length");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= outputs_[i]) throw DomainError("outcome out of range");
    idx += static_cast<std::size_t>(a[i]) * output_stride_[i];
  }
  return idx;
}

std::vector<int> Scenario::decode_inputs(std::size_t x) const {
  std::vector<int> out(inputs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = input_of(x, static_cast<int>(i));
  return out;
}

std::vector<int> Scenario::decode_outcomes(std::size_t a) const {
  std::vector<int> out(outputs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = outcome_of(a, static_cast<int>(i));
  return out;
}

int Scenario::input_of(std::size_t x, int party) const noexcept {
  const auto p = static_cast<std::size_t>(party);
  return static_cast<int>((x / input_stride_[p]) % static_cast<std::size_t>(inputs_[p]));
}

int Scenario::outcome_of(std::size_t a, int party) const noexcept {
  const auto p = static_cast<std::size_t>(party);
  return static_cast<int>((a / output_stride_[p]) % static_cast<std::size_t>(outputs_[p]));
}

Scenario Scenario::without_party(int party) const {
  if (party < 0 || party >= parties()) throw DomainError("party index out of range");
  if (parties() == 1) throw DomainError("cannot remove the only party");
  auto in = inputs_;
  auto out = outputs_;
  in.erase(in.begin() + party);
  out.erase(out.begin() + party);
  return {std::move(in), std::move(out)};
}

bool Scenario::is_binary() const noexcept {
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (inputs_[i] != 2 || outputs_[i] != 2) return false;
  }
  return true;
}

std::string Scenario::describe() const {
  std::ostringstream os;
  os << parties() << " parties, inputs (";
  for (std::size_t i = 0; i < inputs_.size(); ++i) os << (i ? "," : "") << inputs_[i];
  os << "), outputs (";
  for (std::size_t i = 0; i < outputs_.size(); ++i) os << (i ? "," : "") << outputs_[i];
  os << ")";
  return os.str();
}

}  // namespace nqbell
