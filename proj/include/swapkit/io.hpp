// Copyright 2026 The swapkit authors
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

// File formats: state specifications (JSON), interferometer circuits
// (line-oriented text), and result records (JSON lines).  All floats are
// written with 17 significant digits so that a reread value is bit
// identical and rerunning a config reproduces its results file exactly.
//
// State specification fields:
//   mode_count : int
//   n_max      : int   (global total-photon cutoff)
//   kind       : "pure" | "mixed" | "fock" | "coherent"
//   terms      : [{"occupation": [ints], "amplitude": num | [re, im]}]  (pure)
//   matrix     : [[num | [re, im], ...], ...]                           (mixed)
//   occupation : [ints]                                                 (fock)
//   alpha      : num | [re, im]                                         (coherent)
//
// This header depends on the vendored nlohmann json single header.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swapkit/common.hpp"
#include "swapkit/fock.hpp"
#include "swapkit/interferometer.hpp"

namespace swapkit {

// Malformed input files / configs; the CLI maps this to its "parse error"
// exit status, distinct from dimension errors (std::invalid_argument) and
// numerical diagnostics (numerical_error).
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline Complex parse_complex(const nlohmann::json& j, const char* what) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw parse_error(std::string(what) +
                    ": expected a number or [re, im] pair");
}

inline OccupationVector parse_occupation(const nlohmann::json& j,
                                         const char* what) {
  if (!j.is_array())
    throw parse_error(std::string(what) + ": expected an array of integers");
  OccupationVector occ;
  occ.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer())
      throw parse_error(std::string(what) + ": occupation entries must be integers");
    occ.push_back(v.get<int>());
  }
  return occ;
}

}  // namespace detail

inline MultiModeState parse_state_spec(const nlohmann::json& spec) {
  if (!spec.is_object()) throw parse_error("state spec: expected an object");
  if (!spec.contains("kind") || !spec["kind"].is_string())
    throw parse_error("state spec: missing string field 'kind'");
  const std::string kind = spec["kind"].get<std::string>();

  if (kind == "coherent") {
    if (!spec.contains("n_max") || !spec["n_max"].is_number_integer())
      throw parse_error("state spec: coherent state needs integer 'n_max'");
    if (!spec.contains("alpha"))
      throw parse_error("state spec: coherent state needs 'alpha'");
    return coherent_state(spec["n_max"].get<int>(),
                          detail::parse_complex(spec["alpha"], "alpha"));
  }

  for (const char* field : {"mode_count", "n_max"})
    if (!spec.contains(field) || !spec[field].is_number_integer())
      throw parse_error(std::string("state spec: missing integer field '") +
                        field + "'");
  const CutoffConfig cutoff{spec["n_max"].get<int>(),
                            spec["mode_count"].get<int>()};

  if (kind == "fock") {
    if (!spec.contains("occupation"))
      throw parse_error("state spec: fock state needs 'occupation'");
    return fock_state(cutoff,
                      detail::parse_occupation(spec["occupation"], "occupation"));
  }

  if (kind == "pure") {
    if (!spec.contains("terms") || !spec["terms"].is_array() ||
        spec["terms"].empty())
      throw parse_error("state spec: pure state needs a nonempty 'terms' array");
    auto basis = BasisSet::make(cutoff);
    Vector amp = Vector::Zero(basis->dim());
    for (const auto& term : spec["terms"]) {
      if (!term.is_object() || !term.contains("occupation") ||
          !term.contains("amplitude"))
        throw parse_error(
            "state spec: each term needs 'occupation' and 'amplitude'");
      const OccupationVector occ =
          detail::parse_occupation(term["occupation"], "occupation");
      amp[basis->index_of(occ)] +=
          detail::parse_complex(term["amplitude"], "amplitude");
    }
    return MultiModeState::pure(std::move(basis), std::move(amp));
  }

  if (kind == "mixed") {
    if (!spec.contains("matrix") || !spec["matrix"].is_array())
      throw parse_error("state spec: mixed state needs a 'matrix' array");
    auto basis = BasisSet::make(cutoff);
    const auto& rows = spec["matrix"];
    if (static_cast<int>(rows.size()) != basis->dim())
      throw std::invalid_argument(
          "state spec: matrix has " + std::to_string(rows.size()) +
          " rows, basis with n_max = " + std::to_string(cutoff.max_total_photons) +
          " and " + std::to_string(cutoff.mode_count) + " modes has dimension " +
          std::to_string(basis->dim()));
    Matrix rho(basis->dim(), basis->dim());
    for (int r = 0; r < basis->dim(); ++r) {
      if (!rows[static_cast<std::size_t>(r)].is_array() ||
          static_cast<int>(rows[static_cast<std::size_t>(r)].size()) !=
              basis->dim())
        throw parse_error("state spec: matrix rows must all have basis dimension");
      for (int c = 0; c < basis->dim(); ++c)
        rho(r, c) = detail::parse_complex(
            rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
            "matrix entry");
    }
    return MultiModeState::density(std::move(basis), std::move(rho));
  }

  throw parse_error("state spec: unknown kind '" + kind + "'");
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("JSON parse failure in " + path + ": " + e.what());
  }
  return j;
}

inline MultiModeState load_state_file(const std::string& path) {
  return parse_state_spec(load_json_file(path));
}

// --------------------------------------------------------------------------
// Circuit files.  Line oriented:
//   dim <N>
//   rotation <mode_a> <mode_b> <mixing_angle> <phase>
//   phase <mode> <value>
// Angles in radians, 17 significant digits; '#' starts a comment line.

inline void write_circuit(std::ostream& out, const ReckPlan& plan) {
  out << "dim " << plan.dim << "\n";
  for (const auto& e : plan.elements) {
    if (const auto* rot = std::get_if<TwoModeRotation>(&e)) {
      out << "rotation " << rot->mode_a << " " << rot->mode_b << " "
          << format_float(rot->mixing_angle) << " " << format_float(rot->phase)
          << "\n";
    } else {
      const auto& ph = std::get<SinglePhase>(e);
      out << "phase " << ph.mode << " " << format_float(ph.phase) << "\n";
    }
  }
}

inline void write_circuit_file(const std::string& path, const ReckPlan& plan) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open circuit file for writing: " + path);
  write_circuit(out, plan);
}

inline ReckPlan read_circuit(std::istream& in) {
  ReckPlan plan;
  bool have_dim = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    const auto fail = [&](const std::string& why) {
      throw parse_error("circuit line " + std::to_string(lineno) + ": " + why);
    };
    if (tag == "dim") {
      if (have_dim) fail("duplicate dim line");
      if (!(fields >> plan.dim) || plan.dim < 1) fail("bad dimension");
      have_dim = true;
    } else if (tag == "rotation") {
      if (!have_dim) fail("rotation before dim");
      TwoModeRotation rot;
      if (!(fields >> rot.mode_a >> rot.mode_b >> rot.mixing_angle >>
            rot.phase))
        fail("expected: rotation <a> <b> <angle> <phase>");
      plan.elements.emplace_back(rot);
    } else if (tag == "phase") {
      if (!have_dim) fail("phase before dim");
      SinglePhase ph;
      if (!(fields >> ph.mode >> ph.phase))
        fail("expected: phase <mode> <value>");
      plan.elements.emplace_back(ph);
    } else {
      fail("unknown element '" + tag + "'");
    }
  }
  if (!have_dim) throw parse_error("circuit file: missing dim line");
  return plan;
}

inline ReckPlan read_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open circuit file: " + path);
  return read_circuit(in);
}

// --------------------------------------------------------------------------
// Result records: one JSON object per line, keys in insertion order, all
// floats at 17 significant digits.

class RecordWriter {
 public:
  void add_string(const std::string& key, const std::string& value) {
    add_raw(key, quote(value));
  }
  void add_int(const std::string& key, long long value) {
    add_raw(key, std::to_string(value));
  }
  void add_uint(const std::string& key, unsigned long long value) {
    add_raw(key, std::to_string(value));
  }
  void add_bool(const std::string& key, bool value) {
    add_raw(key, value ? "true" : "false");
  }
  void add_float(const std::string& key, double value) {
    add_raw(key, format_float(value));
  }
  void add_float_array(const std::string& key, const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += format_float(v[i]);
    }
    out += "]";
    add_raw(key, out);
  }
  void add_raw(const std::string& key, const std::string& rendered) {
    fields_.emplace_back(key, rendered);
  }

  std::string line() const {
    std::string out = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) out += ",";
      out += quote(fields_[i].first);
      out += ":";
      out += fields_[i].second;
    }
    out += "}";
    return out;
  }

  static std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
          } else {
            out += c;
          }
      }
    }
    out += "\"";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

// Occupation histogram rendered as [[occupation...], mass] pairs.
inline std::string render_histogram(
    const std::vector<std::pair<OccupationVector, double>>& outcomes,
    bool skip_zero_mass = true) {
  std::string out = "[";
  bool first = true;
  for (const auto& [occ, mass] : outcomes) {
    if (skip_zero_mass && mass == 0.0) continue;
    if (!first) out += ",";
    first = false;
    out += "[[";
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(occ[i]);
    }
    out += "],";
    out += format_float(mass);
    out += "]";
  }
  out += "]";
  return out;
}

}  // namespace swapkit
