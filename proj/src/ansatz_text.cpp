#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "qntk/ansatz.hpp"
#include "qntk/error.hpp"

namespace qntk {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string letters_of(const PauliString& p) {
  std::string s = p.phase() < 0 ? "-" : "";
  for (Pauli l : p.letters()) s += to_char(l);
  return s;
}

std::string describe_gate(const DenseGate& g) {
  const auto& t = g.targets();
  const std::string& lb = g.label();
  if (lb == "h" && g.matrix() == hadamard(t[0]).matrix()) return "h(" + std::to_string(t[0]) + ")";
  if (lb == "x" && g.matrix() == pauli_x_gate(t[0]).matrix()) return "x(" + std::to_string(t[0]) + ")";
  if (lb == "cx" && g.arity() == 2 && g.matrix() == cx(t[1], t[0]).matrix())
    return "cx(" + std::to_string(t[1]) + "," + std::to_string(t[0]) + ")";
  if (lb == "p" && g.arity() == 1) {
    const double lambda = std::arg(g.matrix()[3]);
    if (phase_gate(t[0], lambda).matrix() == g.matrix())
      return "p(" + std::to_string(t[0]) + ";" + fmt(lambda) + ")";
  }
  std::string s = "u(";
  for (std::size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
  s += ";";
  for (std::size_t k = 0; k < g.matrix().size(); ++k)
    s += (k ? "," : "") + fmt(g.matrix()[k].real()) + ":" + fmt(g.matrix()[k].imag());
  return s + ")";
}

std::string describe_op(const FixedOp& op) {
  if (const auto* g = std::get_if<DenseGate>(&op)) return describe_gate(*g);
  const auto& r = std::get<PauliRotation>(op);
  return "rot(" + letters_of(r.generator) + ";" + fmt(r.angle) + ")";
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Splits on `sep` outside parentheses.
std::vector<std::string> split_top(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ParseError("invalid number '" + s + "'", line);
  return v;
}

std::size_t parse_index(const std::string& s, std::size_t line) {
  if (s.empty()) throw ParseError("missing index", line);
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("invalid index '" + s + "'", line);
  return std::stoul(s);
}

FixedOp parse_op(const std::string& item, std::size_t line) {
  const auto open = item.find('(');
  if (open == std::string::npos || item.back() != ')')
    throw ParseError("malformed gate '" + item + "'", line);
  const std::string name = item.substr(0, open);
  const std::string body = item.substr(open + 1, item.size() - open - 2);
  const auto semi = body.find(';');
  const std::string head = body.substr(0, semi);
  const std::string tail = semi == std::string::npos ? "" : body.substr(semi + 1);
  const auto args = split(head, ',');
  try {
    if (name == "h" && args.size() == 1 && tail.empty()) return hadamard(parse_index(args[0], line));
    if (name == "x" && args.size() == 1 && tail.empty()) return pauli_x_gate(parse_index(args[0], line));
    if (name == "cx" && args.size() == 2 && tail.empty())
      return cx(parse_index(args[0], line), parse_index(args[1], line));
    if (name == "p" && args.size() == 1 && semi != std::string::npos)
      return phase_gate(parse_index(args[0], line), parse_double(tail, line));
    if (name == "rot" && semi != std::string::npos)
      return PauliRotation{PauliString::parse(head), parse_double(tail, line)};
    if (name == "u" && (args.size() == 1 || args.size() == 2) && semi != std::string::npos) {
      std::vector<std::size_t> targets;
      for (const auto& a : args) targets.push_back(parse_index(a, line));
      std::vector<Complex> m;
      for (const auto& e : split(tail, ',')) {
        const auto colon = e.find(':');
        if (colon == std::string::npos) throw ParseError("matrix entry '" + e + "' needs re:im", line);
        m.emplace_back(parse_double(e.substr(0, colon), line), parse_double(e.substr(colon + 1), line));
      }
      return DenseGate(std::move(targets), std::move(m), "u");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string(e.what()), line);
  }
  throw ParseError("unknown gate '" + item + "'", line);
}

}  // namespace

std::string describe(const LayeredAnsatz& ansatz) {
  std::ostringstream out;
  for (const auto& l : ansatz.layers()) {
    out << "layer " << l.angle_index << " gen=" << letters_of(l.generator) << " fixed=";
    if (l.fixed.empty()) out << "none";
    for (std::size_t k = 0; k < l.fixed.size(); ++k) out << (k ? ";" : "") << describe_op(l.fixed[k]);
    out << '\n';
  }
  return out.str();
}

LayeredAnsatz parse_ansatz(std::string_view text) {
  std::vector<Layer> layers;
  std::size_t n_qubits = 0;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kw;
    if (!(fields >> kw)) continue;
    if (kw != "layer") throw ParseError("expected 'layer', got '" + kw + "'", line_no);
    std::string idx, gen, fixed;
    if (!(fields >> idx >> gen >> fixed)) throw ParseError("expected 'layer <idx> gen=... fixed=...'", line_no);
    std::string extra;
    if (fields >> extra) throw ParseError("unexpected trailing text '" + extra + "'", line_no);
    if (gen.rfind("gen=", 0) != 0) throw ParseError("expected gen=<letters>", line_no);
    if (fixed.rfind("fixed=", 0) != 0) throw ParseError("expected fixed=<gate-list>", line_no);
    Layer l;
    l.angle_index = parse_index(idx, line_no);
    try {
      l.generator = PauliString::parse(gen.substr(4));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
    if (n_qubits == 0) n_qubits = l.generator.n_qubits();
    if (l.generator.n_qubits() != n_qubits) throw ParseError("generator length differs from earlier layers", line_no);
    const std::string list = fixed.substr(6);
    if (!list.empty() && list != "none")
      for (const auto& item : split_top(list, ';')) l.fixed.push_back(parse_op(item, line_no));
    layers.push_back(std::move(l));
  }
  if (layers.empty()) throw ParseError("ansatz description has no layers", line_no);
  try {
    return LayeredAnsatz(n_qubits, std::move(layers));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace qntk
