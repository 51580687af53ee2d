#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "apx/numeric.hpp"

namespace apx {

// Reports are insertion-ordered JSON so that rendered output is byte-stable
// for a fixed configuration.  Exact ratios travel as {"num": .., "den": ..};
// floats are rounded to 12 significant digits before storage to keep golden
// files portable.
using Report = nlohmann::ordered_json;

Report rational_json(const Rational& r);
Report integer_json(const Integer& v);
double rounded(double v);

// Pretty JSON with trailing newline (the CLI's byte-stable format).
std::string render_json(const Report& r);
// Table extraction: reports carrying {"table": {"columns": [...], "rows":
// [[...], ...]}} render as CSV; otherwise falls back to JSON.
std::string render_csv(const Report& r);

}  // namespace apx
