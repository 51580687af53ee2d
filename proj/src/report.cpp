#include "apx/report.hpp"

#include <cstdio>
#include <cstdlib>

namespace apx {

Report integer_json(const Integer& v) {
  if (v <= std::numeric_limits<std::int64_t>::max() &&
      v >= std::numeric_limits<std::int64_t>::min())
    return Report(static_cast<std::int64_t>(v));
  return Report(v.str());
}

Report rational_json(const Rational& r) {
  Report j;
  j["num"] = integer_json(numerator(r));
  j["den"] = integer_json(denominator(r));
  return j;
}

double rounded(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string render_json(const Report& r) { return r.dump(2) + "\n"; }

namespace {

std::string csv_cell(const Report& v) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    bool quote = s.find_first_of(",\"\n") != std::string::npos;
    if (!quote) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }
  if (v.is_object() && v.contains("num") && v.contains("den"))
    return v["num"].dump() + "/" + v["den"].dump();
  return v.dump();
}

}  // namespace

std::string render_csv(const Report& r) {
  if (!r.is_object() || !r.contains("table")) return render_json(r);
  const Report& t = r["table"];
  if (!t.contains("columns") || !t.contains("rows")) return render_json(r);
  std::string out;
  const auto& cols = t["columns"];
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ",";
    out += csv_cell(cols[i]);
  }
  out += "\n";
  for (const auto& row : t["rows"]) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += csv_cell(row[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace apx
