#pragma once

// JSON channel files and report serialization.
//
// Channel schema:
//   {"dim": 2, "type": "low_noise" | "depolarizing" | "gad" | "unitary_rotation",
//    "M": [matrix, ...],          // low_noise
//    "kappa": [complex, ...],     // low_noise, optional declared first-order data
//    "N1": [matrix, ...],         // low_noise, optional, same length as kappa
//    "betaE": real,               // gad
//    "axis": [x, y, z]}           // unitary_rotation, default [0, 0, 1]
// complex = [re, im] (a bare number is read as a real value),
// matrix = row-major nested arrays of complex.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qest/catalog.hpp"
#include "qest/channel.hpp"
#include "qest/lownoise.hpp"
#include "qest/unitary.hpp"

namespace qest::io {

using nlohmann::json;

/// Malformed channel file.  The message carries a line/column or a JSON pointer.
class ParseError : public Error {
public:
  using Error::Error;
};

enum class ChannelType { LowNoise, Depolarizing, Gad, UnitaryRotation };

inline std::string to_string(ChannelType t) {
  switch (t) {
  case ChannelType::LowNoise: return "low_noise";
  case ChannelType::Depolarizing: return "depolarizing";
  case ChannelType::Gad: return "gad";
  case ChannelType::UnitaryRotation: return "unitary_rotation";
  }
  return "?";
}

struct ChannelSpec {
  int dim = 2;
  ChannelType type = ChannelType::Depolarizing;
  std::vector<ComplexMatrix> ms;
  std::optional<std::vector<Complex>> kappa;
  std::optional<std::vector<ComplexMatrix>> n1;
  double beta_e = 0.0;
  Vec3 axis = Vec3::UnitZ();
};

// ---------------------------------------------------------------------------
// Primitive conversions

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Adding 0.0 turns -0.0 into 0.0.
inline json vec3_to_json(const Vec3& v) { return json::array({v(0) + 0.0, v(1) + 0.0, v(2) + 0.0}); }

namespace detail {

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(where + ": expected a complex number [re, im]");
}

inline ComplexMatrix matrix_from_json(const json& j, int dim, const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(dim))
    throw ParseError(where + ": expected " + std::to_string(dim) + " rows");
  ComplexMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const std::string rw = where + "/" + std::to_string(r);
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
      throw ParseError(rw + ": expected " + std::to_string(dim) + " columns");
    for (int c = 0; c < dim; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], rw + "/" + std::to_string(c));
  }
  return m;
}

inline std::vector<ComplexMatrix> matrix_list(const json& doc, const char* key, int dim) {
  const std::string where = std::string("/") + key;
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty())
    throw ParseError(where + ": expected a non-empty array of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < doc[key].size(); ++i)
    out.push_back(matrix_from_json(doc[key][i], dim, where + "/" + std::to_string(i)));
  return out;
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Channel files

inline ChannelSpec parse_channel_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("/: expected a JSON object");

  ChannelSpec spec;
  if (!doc.contains("type") || !doc["type"].is_string()) throw ParseError("/type: expected a string");
  const auto type = doc["type"].get<std::string>();
  if (type == "low_noise")
    spec.type = ChannelType::LowNoise;
  else if (type == "depolarizing")
    spec.type = ChannelType::Depolarizing;
  else if (type == "gad")
    spec.type = ChannelType::Gad;
  else if (type == "unitary_rotation")
    spec.type = ChannelType::UnitaryRotation;
  else
    throw ParseError("/type: unknown channel type '" + type + "'");

  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1 || doc["dim"].get<int>() > 8)
      throw ParseError("/dim: expected an integer in [1, 8]");
    spec.dim = doc["dim"].get<int>();
  } else if (spec.type == ChannelType::LowNoise) {
    throw ParseError("/dim: required for low_noise channels");
  }
  if (spec.type != ChannelType::LowNoise && spec.dim != 2)
    throw ParseError("/dim: " + type + " channels are qubit channels (dim 2)");

  switch (spec.type) {
  case ChannelType::LowNoise:
    spec.ms = detail::matrix_list(doc, "M", spec.dim);
    if (doc.contains("kappa") || doc.contains("N1")) {
      if (!doc.contains("kappa") || !doc["kappa"].is_array()) throw ParseError("/kappa: expected an array of complex numbers");
      std::vector<Complex> k;
      for (std::size_t i = 0; i < doc["kappa"].size(); ++i)
        k.push_back(detail::complex_from_json(doc["kappa"][i], "/kappa/" + std::to_string(i)));
      auto n1 = detail::matrix_list(doc, "N1", spec.dim);
      if (n1.size() != k.size()) throw ParseError("/N1: length differs from /kappa");
      spec.kappa = std::move(k);
      spec.n1 = std::move(n1);
    }
    break;
  case ChannelType::Gad:
    if (!doc.contains("betaE") || !doc["betaE"].is_number()) throw ParseError("/betaE: expected a number");
    spec.beta_e = doc["betaE"].get<double>();
    break;
  case ChannelType::UnitaryRotation:
    if (doc.contains("axis")) {
      const json& a = doc["axis"];
      if (!a.is_array() || a.size() != 3 || !std::all_of(a.begin(), a.end(), [](const json& v) { return v.is_number(); }))
        throw ParseError("/axis: expected three numbers");
      spec.axis = Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
    }
    break;
  case ChannelType::Depolarizing: break;
  }
  return spec;
}

inline json to_json(const ChannelSpec& spec) {
  json doc = {{"dim", spec.dim}, {"type", to_string(spec.type)}};
  switch (spec.type) {
  case ChannelType::LowNoise: {
    json ms = json::array();
    for (const auto& m : spec.ms) ms.push_back(matrix_to_json(m));
    doc["M"] = std::move(ms);
    if (spec.kappa && spec.n1) {
      json k = json::array(), n = json::array();
      for (const auto& z : *spec.kappa) k.push_back(complex_to_json(z));
      for (const auto& m : *spec.n1) n.push_back(matrix_to_json(m));
      doc["kappa"] = std::move(k);
      doc["N1"] = std::move(n);
    }
    break;
  }
  case ChannelType::Gad: doc["betaE"] = spec.beta_e; break;
  case ChannelType::UnitaryRotation: doc["axis"] = vec3_to_json(spec.axis); break;
  case ChannelType::Depolarizing: break;
  }
  return doc;
}

/// low_noise description of an existing channel: noise operators plus its
/// first-order data.
inline ChannelSpec spec_from_low_noise(const LowNoiseChannel& ln) {
  ChannelSpec spec;
  spec.type = ChannelType::LowNoise;
  spec.dim = static_cast<int>(ln.dim);
  spec.ms = ln.ms;
  spec.kappa = ln.kappas;
  spec.n1 = ln.n1;
  return spec;
}

using BuiltChannel = std::variant<LowNoiseChannel, UnitaryFamily>;

/// Low-noise files with declared kappa/N1 keep the declared data; the exact
/// generator is the canonical one for their noise operators.
inline BuiltChannel build(const ChannelSpec& spec) {
  switch (spec.type) {
  case ChannelType::Depolarizing: return catalog::depolarizing();
  case ChannelType::Gad:
    try {
      return catalog::gad(spec.beta_e);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("/betaE: ") + e.what());
    }
  case ChannelType::UnitaryRotation:
    try {
      return catalog::rotation_unitary(spec.axis);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("/axis: ") + e.what());
    }
  case ChannelType::LowNoise: {
    auto ln = LowNoiseChannel::from_noise_operators(spec.ms);
    if (spec.kappa && spec.n1) {
      ln.kappas = *spec.kappa;
      ln.n1 = *spec.n1;
    }
    return ln;
  }
  }
  throw ValidationError("unknown channel type");
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const EnhancementReport& r) {
  json doc = {{"eta", r.eta},
              {"regime", to_string(r.regime)},
              {"L_JS", r.l_js},
              {"L_JSA", r.l_jsa},
              {"x_sphere", vec3_to_json(r.x_sphere.vec())},
              {"x_ball", vec3_to_json(r.x_ball.vec())},
              {"method", to_string(r.method)}};
  doc["agreement"] = r.agreement ? json(*r.agreement) : json(nullptr);
  doc["k_norm"] = r.k_norm ? json(*r.k_norm) : json(nullptr);
  return doc;
}

} // namespace qest::io
