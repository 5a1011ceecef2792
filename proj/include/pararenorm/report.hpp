#pragma once

// Canonical report emission.  All machine-readable output goes through the
// helpers here so that repeated runs are byte-identical: insertion-ordered
// JSON, shortest-round-trip doubles, no timestamps or environment echoes.

#include <charconv>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pararenorm/errors.hpp"
#include "pararenorm/mcf.hpp"
#include "pararenorm/numerics.hpp"

namespace pararenorm {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaTag = "para-renorm/1";

inline Json make_report(const std::string& kind) {
  Json j;
  j["schema"] = kSchemaTag;
  j["kind"] = kind;
  return j;
}

inline Json json_complex(ComplexVal z) { return Json::array({z.real(), z.imag()}); }

inline Json json_rational(const Rational& r) { return mcf::format_rational(r); }

inline Json json_cf(const mcf::SignedCF& cf) {
  Json arr = Json::array();
  for (const auto& pr : cf.pairs()) arr.push_back(Json::array({pr.b, pr.eps}));
  return arr;
}

inline Json json_disk(const Disk& d) {
  Json j;
  j["center"] = json_complex(d.center);
  j["radius"] = d.radius;
  return j;
}

// Shortest round-trip decimal form, used for CSV cells.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << body;
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

}  // namespace pararenorm
