#include "qntk/pauli.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "qntk/error.hpp"

namespace qntk {

namespace {

inline double parity_sign(std::uint64_t b, std::uint64_t z) {
  return (std::popcount(b & z) & 1) ? -1.0 : 1.0;
}

// i^{#Y}: each Y = iXZ contributes one factor of i.
Complex y_phase(std::uint64_t x, std::uint64_t z) {
  static const Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPowers[std::popcount(x & z) & 3];
}

void require_match(const PauliString& p, const StateVector& s) {
  if (p.n_qubits() != s.n_qubits())
    throw DimensionError("Pauli string on " + std::to_string(p.n_qubits()) +
                         " qubits applied to state on " + std::to_string(s.n_qubits()));
}

std::string format_coef(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
  }
  throw ParseError(std::string("invalid Pauli letter '") + c + "'");
}

PauliString::PauliString(std::vector<Pauli> letters, double phase)
    : letters_(std::move(letters)), phase_(phase) {
  if (letters_.empty() || letters_.size() > kMaxQubits)
    throw DimensionError("Pauli string length " + std::to_string(letters_.size()) +
                         " outside [1, " + std::to_string(kMaxQubits) + "]");
  if (!std::isfinite(phase_)) throw ValidationError("Pauli string phase must be finite");
  for (std::size_t q = 0; q < letters_.size(); ++q) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    if (letters_[q] == Pauli::X || letters_[q] == Pauli::Y) x_mask_ |= bit;
    if (letters_[q] == Pauli::Z || letters_[q] == Pauli::Y) z_mask_ |= bit;
  }
}

PauliString PauliString::parse(std::string_view text) {
  double phase = 1.0;
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    if (text[i] == '-') phase = -1.0;
    ++i;
  }
  std::vector<Pauli> letters;
  for (; i < text.size(); ++i) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) continue;
    letters.push_back(pauli_from_char(text[i]));
  }
  if (letters.empty()) throw ParseError("empty Pauli string");
  return PauliString(std::move(letters), phase);
}

PauliString PauliString::identity(std::size_t n_qubits, double phase) {
  return PauliString(std::vector<Pauli>(n_qubits, Pauli::I), phase);
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit, Pauli p, double phase) {
  if (qubit >= n_qubits) throw DimensionError("qubit index out of range");
  std::vector<Pauli> letters(n_qubits, Pauli::I);
  letters[qubit] = p;
  return PauliString(std::move(letters), phase);
}

double PauliString::operator_norm() const noexcept { return std::abs(phase_); }

PauliString PauliString::with_phase(double phase) const { return PauliString(letters_, phase); }

Complex PauliString::letter_phase() const noexcept { return y_phase(x_mask_, z_mask_); }

StateVector PauliString::apply(const StateVector& state) const {
  StateVector out = StateVector::zeros(state.n_qubits());
  apply_add(state, 1.0, out);
  return out;
}

void PauliString::apply_add(const StateVector& in, Complex scale, StateVector& out) const {
  require_match(*this, in);
  require_same_dimension(in, out);
  const Complex c = scale * phase_ * letter_phase();
  for (std::uint64_t b = 0; b < in.dimension(); ++b)
    out[b ^ x_mask_] += c * parity_sign(b, z_mask_) * in[b];
}

Complex PauliString::matrix_element(const StateVector& a, const StateVector& b) const {
  require_match(*this, a);
  require_same_dimension(a, b);
  const Complex c = phase_ * letter_phase();
  const std::uint64_t x = x_mask_, z = z_mask_;
  const Complex s = pairwise_reduce<Complex>(0, b.dimension(), [&](std::size_t k) {
    return std::conj(a[k ^ x]) * (parity_sign(k, z) * b[k]);
  });
  return c * s;
}

std::string PauliString::to_string() const {
  std::string letters;
  for (Pauli p : letters_) letters += to_char(p);
  if (phase_ == 1.0) return letters;
  if (phase_ == -1.0) return "-" + letters;
  return format_coef(phase_) + "*" + letters;
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (n_qubits() != other.n_qubits()) throw DimensionError("Pauli strings differ in length");
  const int anti = std::popcount(x_mask_ & other.z_mask_) + std::popcount(z_mask_ & other.x_mask_);
  return (anti & 1) == 0;
}

PauliObservable::PauliObservable(std::vector<PauliString> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ValidationError("observable has no terms");
  n_qubits_ = terms_.front().n_qubits();
  for (const auto& t : terms_)
    if (t.n_qubits() != n_qubits_) throw DimensionError("observable terms differ in qubit count");
}

PauliObservable::PauliObservable(PauliString term)
    : PauliObservable(std::vector<PauliString>{std::move(term)}) {}

PauliObservable PauliObservable::parse(std::string_view text) {
  std::vector<PauliString> terms;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  bool first = true;
  while (i < text.size()) {
    double sign = 1.0;
    if (text[i] == '+' || text[i] == '-') {
      if (text[i] == '-') sign = -1.0;
      ++i;
      skip_ws();
    } else if (!first) {
      throw ParseError("expected '+' or '-' between observable terms in '" + std::string(text) + "'");
    }
    double coef = 1.0;
    if (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
      const std::string rest(text.substr(i));
      char* end = nullptr;
      coef = std::strtod(rest.c_str(), &end);
      i += static_cast<std::size_t>(end - rest.c_str());
      skip_ws();
      if (i >= text.size() || text[i] != '*')
        throw ParseError("expected '*' after coefficient in '" + std::string(text) + "'");
      ++i;
      skip_ws();
    }
    std::vector<Pauli> letters;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i])))
      letters.push_back(pauli_from_char(text[i++]));
    if (letters.empty()) throw ParseError("missing Pauli letters in '" + std::string(text) + "'");
    terms.emplace_back(std::move(letters), sign * coef);
    skip_ws();
    first = false;
  }
  if (terms.empty()) throw ParseError("empty observable");
  return PauliObservable(std::move(terms));
}

double PauliObservable::norm_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.phase());
  return s;
}

bool PauliObservable::is_identity() const {
  for (const auto& t : terms_)
    if (!t.is_identity() && t.phase() != 0.0) return false;
  return true;
}

StateVector PauliObservable::apply(const StateVector& state) const {
  StateVector out = StateVector::zeros(state.n_qubits());
  for (const auto& t : terms_) t.apply_add(state, 1.0, out);
  return out;
}

std::string PauliObservable::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    std::string t = terms_[k].to_string();
    if (k > 0) {
      if (t.front() == '-') {
        s += " - ";
        t.erase(0, 1);
      } else {
        s += " + ";
      }
    }
    s += t;
  }
  return s;
}

Complex expectation_complex(const StateVector& state, const PauliObservable& obs) {
  if (obs.n_qubits() != state.n_qubits())
    throw DimensionError("observable and state differ in qubit count");
  Complex s{};
  for (const auto& t : obs.terms()) s += t.matrix_element(state, state);
  return s;
}

double expectation(const StateVector& state, const PauliObservable& obs) {
  return expectation_complex(state, obs).real();
}

void apply_pauli_rotation_inplace(StateVector& state, const PauliString& g, double angle) {
  require_match(g, state);
  if (std::abs(std::abs(g.phase()) - 1.0) > kDefaultTolerance)
    throw ValidationError("rotation generator phase must be +1 or -1");
  const double c = std::cos(angle);
  const Complex is = Complex(0.0, std::sin(angle)) * g.phase() * y_phase(g.x_mask(), g.z_mask());
  const std::uint64_t x = g.x_mask(), z = g.z_mask();
  if (x == 0) {
    for (std::uint64_t b = 0; b < state.dimension(); ++b)
      state[b] *= c + is * parity_sign(b, z);
    return;
  }
  for (std::uint64_t b = 0; b < state.dimension(); ++b) {
    const std::uint64_t p = b ^ x;
    if (p < b) continue;
    const Complex a0 = state[b], a1 = state[p];
    state[b] = c * a0 + is * parity_sign(p, z) * a1;
    state[p] = c * a1 + is * parity_sign(b, z) * a0;
  }
}

StateVector apply_pauli_rotation(const StateVector& state, const PauliString& g, double angle) {
  StateVector out = state;
  apply_pauli_rotation_inplace(out, g, angle);
  return out;
}

double normalized_trace_inner(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("Pauli strings differ in length");
  return a.same_letters(b) ? a.phase() * b.phase() : 0.0;
}

}  // namespace qntk
