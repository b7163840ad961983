// Copyright 2026 The hqsim Authors
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

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "hqsim/circuit.hpp"
#include "hqsim/errors.hpp"

namespace hqsim {

namespace detail {

/// Shortest exact decimal form: parsing it back yields the same double,
/// and re-printing that double yields the same text.
inline std::string format_angle(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// OpenQASM 2.0 text for the circuit: fixed header, one quantum and one
/// classical register, one semicolon-terminated statement per line.
inline std::string export_qasm(const Circuit& c) {
  c.validate();
  std::ostringstream out;
  out << "OPENQASM 2.0;\n";
  out << "include \"qelib1.inc\";\n";
  out << "qreg q[" << c.n_qubits << "];\n";
  out << "creg c[" << c.n_qubits << "];\n";
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::H:
      case GateKind::X:
      case GateKind::Y:
      case GateKind::Z:
        out << gate_name(g.kind) << " q[" << g.targets[0] << "];\n";
        break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ:
      case GateKind::U1:
        out << gate_name(g.kind) << "(" << detail::format_angle(g.params[0])
            << ") q[" << g.targets[0] << "];\n";
        break;
      case GateKind::U3:
        out << "u3(" << detail::format_angle(g.params[0]) << ","
            << detail::format_angle(g.params[1]) << ","
            << detail::format_angle(g.params[2]) << ") q[" << g.targets[0] << "];\n";
        break;
      case GateKind::CNOT:
        out << "cx q[" << g.targets[0] << "],q[" << g.targets[1] << "];\n";
        break;
      case GateKind::MEASURE_Z:
        out << "measure q[" << g.targets[0] << "] -> c[" << g.targets[0] << "];\n";
        break;
    }
  }
  return out.str();
}

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline int parse_qubit_ref(const std::string& tok, const std::string& reg) {
  // Expect reg[i]
  const std::string pre = reg + "[";
  if (tok.rfind(pre, 0) != 0 || tok.back() != ']')
    throw ConfigError("parse_qasm: bad register reference '" + tok + "'");
  return std::stoi(tok.substr(pre.size(), tok.size() - pre.size() - 1));
}

inline std::vector<double> parse_angles(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(std::strtod(cur.c_str(), nullptr));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!strip(cur).empty()) out.push_back(std::strtod(cur.c_str(), nullptr));
  return out;
}

}  // namespace detail

/// Minimal reader for the subset export_qasm emits. Returns a plain gate
/// sequence (no timing metadata); roles and step structure do not survive
/// serialization.
inline Circuit parse_qasm(const std::string& text) {
  Circuit c;
  bool saw_header = false;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = raw;
    const auto comment = line.find("//");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::strip(line);
    if (line.empty()) continue;
    if (line.back() != ';')
      throw ConfigError("parse_qasm: statement missing ';': " + raw);
    line.pop_back();
    line = detail::strip(line);

    if (line.rfind("OPENQASM", 0) == 0) {
      saw_header = true;
      continue;
    }
    if (line.rfind("include", 0) == 0) continue;
    if (line.rfind("qreg", 0) == 0) {
      const auto l = line.find('['), r = line.find(']');
      if (l == std::string::npos || r == std::string::npos)
        throw ConfigError("parse_qasm: bad qreg declaration");
      c.n_qubits = std::stoi(line.substr(l + 1, r - l - 1));
      continue;
    }
    if (line.rfind("creg", 0) == 0) continue;

    if (line.rfind("measure", 0) == 0) {
      const auto arrow = line.find("->");
      if (arrow == std::string::npos)
        throw ConfigError("parse_qasm: bad measure statement");
      const std::string qtok = detail::strip(line.substr(7, arrow - 7));
      c.gates.push_back(Gate::measure_z(detail::parse_qubit_ref(qtok, "q")));
      continue;
    }

    // gate[(angles)] operand[,operand]
    std::string head, operands;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw ConfigError("parse_qasm: bad statement: " + raw);
    head = line.substr(0, sp);
    operands = detail::strip(line.substr(sp + 1));

    std::string name = head;
    std::vector<double> angles;
    const auto paren = head.find('(');
    if (paren != std::string::npos) {
      if (head.back() != ')') throw ConfigError("parse_qasm: bad parameter list");
      name = head.substr(0, paren);
      angles = detail::parse_angles(head.substr(paren + 1, head.size() - paren - 2));
    }

    std::vector<int> qs;
    {
      std::string cur;
      for (char ch : operands + ",") {
        if (ch == ',') {
          qs.push_back(detail::parse_qubit_ref(detail::strip(cur), "q"));
          cur.clear();
        } else {
          cur += ch;
        }
      }
    }

    GateKind kind;
    if (name == "h") kind = GateKind::H;
    else if (name == "x") kind = GateKind::X;
    else if (name == "y") kind = GateKind::Y;
    else if (name == "z") kind = GateKind::Z;
    else if (name == "rx") kind = GateKind::RX;
    else if (name == "ry") kind = GateKind::RY;
    else if (name == "rz") kind = GateKind::RZ;
    else if (name == "u1") kind = GateKind::U1;
    else if (name == "u3") kind = GateKind::U3;
    else if (name == "cx") kind = GateKind::CNOT;
    else throw ConfigError("parse_qasm: unsupported gate '" + name + "'");

    Gate g{kind, qs, angles};
    g.validate();
    c.gates.push_back(std::move(g));
  }
  if (!saw_header) throw ConfigError("parse_qasm: missing OPENQASM header");
  c.validate();
  return c;
}

}  // namespace hqsim
