#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "poisgen/algebra.hpp"
#include "poisgen/census.hpp"
#include "poisgen/endv.hpp"
#include "poisgen/errors.hpp"
#include "poisgen/scalar.hpp"
#include "poisgen/taxonomy.hpp"

#ifndef POISGEN_VERSION
#define POISGEN_VERSION "0.1.0"
#endif

namespace poisgen::io {

using json = nlohmann::json;

inline constexpr std::string_view tool_name = "poisgen";
inline constexpr std::string_view tool_version = POISGEN_VERSION;

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return "sha256:" + os.str();
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(std::string_view text, const std::string &origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(origin + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Algebra files
//
//   {
//     "field": "Q" | "F<p>",
//     "dim": n,
//     "bracket": n×n×n array of scalar strings, bracket[i][j][k] = coefficient of e_k in [e_i, e_j],
//     "circle": same layout for the circle product,
//     "derivation": optional n×n array, derivation[r][c] = coefficient of e_r in D(e_c),
//     "alpha": optional scalar string,
//     "description": optional free text
//   }
//
// Indices in the file are 0-based array positions; reports use 1-based basis labels.

using AnyAlgebra = std::variant<TwoProductAlgebra<Rational>, TwoProductAlgebra<Residue>>;

namespace detail {

template <FieldElement T> T scalar_at(const json &j, FieldSpec f, const std::string &where) {
  if (!j.is_string())
    throw InputError(where + ": expected a scalar string");
  try {
    return T::parse(j.get<std::string>(), f);
  } catch (const InputError &e) {
    throw InputError(where + ": " + e.what());
  }
}

inline const json &array_of(const json &j, std::size_t n, const std::string &where) {
  if (!j.is_array() || j.size() != n)
    throw InputError(where + ": expected an array of length " + std::to_string(n));
  return j;
}

template <FieldElement T> BilinearOp<T> tensor_from(const json &j, FieldSpec f, std::size_t n, const std::string &name) {
  BilinearOp<T> op(f, n);
  array_of(j, n, name);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string wi = name + "[" + std::to_string(i) + "]";
    array_of(j[i], n, wi);
    for (std::size_t jj = 0; jj < n; ++jj) {
      const std::string wj = wi + "[" + std::to_string(jj) + "]";
      array_of(j[i][jj], n, wj);
      for (std::size_t k = 0; k < n; ++k)
        op.set(i, jj, k, scalar_at<T>(j[i][jj][k], f, wj + "[" + std::to_string(k) + "]"));
    }
  }
  return op;
}

template <FieldElement T> TwoProductAlgebra<T> algebra_from(const json &doc, FieldSpec f, std::size_t n) {
  auto bracket = tensor_from<T>(doc.at("bracket"), f, n, "bracket");
  auto circle = tensor_from<T>(doc.at("circle"), f, n, "circle");
  std::optional<LinearMap<T>> d;
  if (doc.contains("derivation")) {
    const json &m = array_of(doc["derivation"], n, "derivation");
    d.emplace(f, n);
    for (std::size_t r = 0; r < n; ++r) {
      const std::string wr = "derivation[" + std::to_string(r) + "]";
      array_of(m[r], n, wr);
      for (std::size_t c = 0; c < n; ++c)
        d->set(r, c, scalar_at<T>(m[r][c], f, wr + "[" + std::to_string(c) + "]"));
    }
  }
  std::optional<T> alpha;
  if (doc.contains("alpha"))
    alpha = scalar_at<T>(doc["alpha"], f, "alpha");
  return TwoProductAlgebra<T>(std::move(bracket), std::move(circle), std::move(d), std::move(alpha));
}

} // namespace detail

inline AnyAlgebra algebra_from_json(const json &doc) {
  if (!doc.is_object())
    throw InputError("algebra file: expected a JSON object");
  static const std::array<std::string_view, 7> known = {"field", "dim", "bracket", "circle",
                                                        "derivation", "alpha", "description"};
  for (const auto &[key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InputError("algebra file: unknown field '" + key + "'");
  for (const char *req : {"field", "dim", "bracket", "circle"})
    if (!doc.contains(req))
      throw InputError(std::string("algebra file: missing field '") + req + "'");
  if (!doc["field"].is_string())
    throw InputError("field: expected \"Q\" or \"F<p>\"");
  const FieldSpec f = FieldSpec::parse(doc["field"].get<std::string>());
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() <= 0)
    throw InputError("dim: expected a positive integer");
  const std::size_t n = doc["dim"].get<std::size_t>();
  if (f.is_rational())
    return detail::algebra_from<Rational>(doc, f, n);
  return detail::algebra_from<Residue>(doc, f, n);
}

inline AnyAlgebra load_algebra(const std::string &path) {
  return algebra_from_json(parse_json(read_file(path), path));
}

template <FieldElement T> json element_to_json(const Element<T> &e) {
  json out = json::array();
  for (const auto &c : e.coords())
    out.push_back(c.to_string());
  return out;
}

template <FieldElement T> json algebra_to_json(const TwoProductAlgebra<T> &a) {
  const std::size_t n = a.dim();
  auto tensor = [&](const BilinearOp<T> &op) {
    json t = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < n; ++j) {
        json cell = json::array();
        for (std::size_t k = 0; k < n; ++k)
          cell.push_back(op.at(i, j, k).to_string());
        row.push_back(std::move(cell));
      }
      t.push_back(std::move(row));
    }
    return t;
  };
  json doc = {{"field", a.field().to_string()}, {"dim", n}, {"bracket", tensor(a.bracket())},
              {"circle", tensor(a.circle())}};
  if (a.derivation()) {
    json m = json::array();
    for (std::size_t r = 0; r < n; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < n; ++c)
        row.push_back(a.derivation()->at(r, c).to_string());
      m.push_back(std::move(row));
    }
    doc["derivation"] = std::move(m);
  }
  if (a.alpha())
    doc["alpha"] = a.alpha()->to_string();
  return doc;
}

// ---------------------------------------------------------------------------
// Reports

inline json kinds_to_json(KindMask mask) {
  json out = json::array();
  for (StructureKind k : all_kinds)
    if (mask & kind_bit(k))
      out.push_back(std::string(kind_name(k)));
  return out;
}

inline KindMask kinds_from_json(const json &j) {
  KindMask mask = 0;
  for (const auto &name : j)
    mask |= kind_bit(require_kind(name.get<std::string>()));
  return mask;
}

inline json kind_list(const std::vector<StructureKind> &kinds) {
  json out = json::array();
  for (auto k : kinds)
    out.push_back(std::string(kind_name(k)));
  return out;
}

template <FieldElement T> json report_to_json(const AxiomReport<T> &r) {
  json failures = json::array();
  for (const auto &f : r.failures)
    failures.push_back({{"axiom", f.axiom},
                        {"witness", f.witness},
                        {"residual", f.residual ? element_to_json(*f.residual) : json(nullptr)}});
  return {{"kind", std::string(kind_name(r.kind))},
          {"passed", r.passed},
          {"alpha", r.alpha_used ? json(r.alpha_used->to_string()) : json(nullptr)},
          {"failures", std::move(failures)},
          {"warnings", r.warnings}};
}

template <FieldElement T> AxiomReport<T> report_from_json(const json &j, FieldSpec f) {
  AxiomReport<T> r{require_kind(j.at("kind").get<std::string>()), j.at("passed").get<bool>(), std::nullopt, {}, {}};
  if (!j.at("alpha").is_null())
    r.alpha_used = T::parse(j["alpha"].get<std::string>(), f);
  for (const auto &fj : j.at("failures")) {
    Failure<T> fail{fj.at("axiom").get<std::string>(), fj.at("witness").get<std::vector<std::size_t>>(), std::nullopt};
    if (!fj.at("residual").is_null()) {
      std::vector<T> coords;
      for (const auto &c : fj["residual"])
        coords.push_back(T::parse(c.get<std::string>(), f));
      fail.residual = Element<T>(f, std::move(coords));
    }
    r.failures.push_back(std::move(fail));
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

inline json envelope(std::string_view command, const std::string &digest) {
  return {{"tool", std::string(tool_name)},
          {"version", std::string(tool_version)},
          {"command", std::string(command)},
          {"input_digest", digest}};
}

inline json catalog_to_json(const endv::Catalog &c) {
  json subs = json::array();
  for (const auto &s : c.subspaces) {
    json blocks = json::array();
    for (std::size_t b = 0; b < 4; ++b)
      if (s.free[b])
        blocks.push_back(std::string(endv::block_names[b]));
    subs.push_back({{"id", s.id}, {"blocks", std::move(blocks)}});
  }
  auto formulas = [](const std::vector<endv::FormulaText> &fs) {
    json out = json::array();
    for (const auto &f : fs)
      out.push_back({{"id", f.id}, {"formula", f.formula}});
    return out;
  };
  return {{"subspaces", std::move(subs)},
          {"brackets", formulas(c.brackets)},
          {"circles", formulas(c.circles)},
          {"derivations", formulas(c.derivations)}};
}

/// Catalog override file; same layout as catalog_to_json. A formula entry may
/// be a bare string, in which case the formula is its own id.
inline endv::Catalog catalog_from_json(const json &j) {
  if (!j.is_object())
    throw InputError("catalog: expected a JSON object");
  for (const auto &[key, _] : j.items())
    if (key != "subspaces" && key != "brackets" && key != "circles" && key != "derivations")
      throw InputError("catalog: unknown field '" + key + "'");
  endv::Catalog c;
  for (const auto &s : j.at("subspaces")) {
    endv::SubspaceTemplate t{s.at("id").get<std::string>(), {}};
    for (const auto &b : s.at("blocks")) {
      const auto name = b.get<std::string>();
      auto it = std::find(endv::block_names.begin(), endv::block_names.end(), name);
      if (it == endv::block_names.end())
        throw InputError("catalog: unknown block '" + name + "' (use WW, UW, WU, UU)");
      t.free[static_cast<std::size_t>(it - endv::block_names.begin())] = true;
    }
    c.subspaces.push_back(std::move(t));
  }
  auto formulas = [&](const char *key) {
    std::vector<endv::FormulaText> out;
    for (const auto &f : j.at(key)) {
      if (f.is_string())
        out.push_back({f.get<std::string>(), f.get<std::string>()});
      else
        out.push_back({f.at("id").get<std::string>(), f.at("formula").get<std::string>()});
    }
    return out;
  };
  c.brackets = formulas("brackets");
  c.circles = formulas("circles");
  c.derivations = formulas("derivations");
  return c;
}

inline json counts_to_json(const std::array<std::uint64_t, kind_count> &counts) {
  json out = json::object();
  for (StructureKind k : all_kinds)
    out[std::string(kind_name(k))] = counts[kind_index(k)];
  return out;
}

inline json survey_to_json(const endv::SurveyReport &r) {
  json rows = json::array();
  for (const auto &row : r.rows)
    rows.push_back({{"subspace", row.subspace},
                    {"bracket", row.bracket},
                    {"circle", row.circle},
                    {"derivation", row.derivation},
                    {"dim", row.dim},
                    {"closed", row.closed},
                    {"kinds_passed", kinds_to_json(row.kinds_passed)}});
  return {{"shape", {{"n", r.shape.n}, {"m", r.shape.m}}},
          {"field", r.field.to_string()},
          {"rows", std::move(rows)},
          {"counts", counts_to_json(r.counts)},
          {"closed_rows", r.closed_rows},
          {"remark_check", r.remark_check},
          {"remark_exceptions", r.remark_exceptions}};
}

inline endv::SurveyReport survey_from_json(const json &j) {
  endv::SurveyReport r{endv::SpaceShape::make(j.at("shape").at("n").get<std::size_t>(),
                                              j.at("shape").at("m").get<std::size_t>()),
                       FieldSpec::parse(j.at("field").get<std::string>()),
                       {},
                       {},
                       j.at("closed_rows").get<std::size_t>(),
                       j.at("remark_check").get<bool>(),
                       j.at("remark_exceptions").get<std::size_t>()};
  for (const auto &row : j.at("rows"))
    r.rows.push_back({row.at("subspace").get<std::string>(), row.at("bracket").get<std::string>(),
                      row.at("circle").get<std::string>(), row.at("derivation").get<std::string>(),
                      row.at("dim").get<std::size_t>(), row.at("closed").get<bool>(),
                      kinds_from_json(row.at("kinds_passed"))});
  for (StructureKind k : all_kinds)
    r.counts[kind_index(k)] = j.at("counts").at(std::string(kind_name(k))).get<std::uint64_t>();
  return r;
}

inline json census_spec_to_json(const census::CensusSpec &s) {
  return {{"field", s.field.to_string()},
          {"dim", s.dim},
          {"with_derivation", s.with_derivation},
          {"kinds", kinds_to_json(s.kinds)},
          {"cap", s.cap}};
}

inline json census_to_json(const census::CensusResult &r) {
  json witnesses = json::object();
  for (StructureKind k : all_kinds)
    if (r.witnesses[kind_index(k)])
      witnesses[std::string(kind_name(k))] = *r.witnesses[kind_index(k)];
  json counts = json::object();
  for (StructureKind k : all_kinds)
    if (r.spec.kinds & kind_bit(k))
      counts[std::string(kind_name(k))] = r.counts[kind_index(k)];
  return {{"spec", census_spec_to_json(r.spec)},
          {"total_enumerated", r.total_enumerated},
          {"counts", std::move(counts)},
          {"witnesses", std::move(witnesses)}};
}

inline census::CensusResult census_from_json(const json &j) {
  const json &s = j.at("spec");
  census::CensusSpec spec{FieldSpec::parse(s.at("field").get<std::string>()), s.at("dim").get<std::size_t>(),
                          s.at("with_derivation").get<bool>(), kinds_from_json(s.at("kinds")),
                          s.at("cap").get<std::uint64_t>()};
  census::CensusResult r{spec, j.at("total_enumerated").get<std::uint64_t>(), {}, {}};
  for (const auto &[name, count] : j.at("counts").items())
    r.counts[kind_index(require_kind(name))] = count.get<std::uint64_t>();
  for (const auto &[name, digits] : j.at("witnesses").items())
    r.witnesses[kind_index(require_kind(name))] = digits.get<std::vector<std::uint32_t>>();
  return r;
}

} // namespace poisgen::io
