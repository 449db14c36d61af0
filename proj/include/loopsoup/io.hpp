#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "loopsoup/experiments.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/soup.hpp"

namespace loopsoup {

inline constexpr int kScanSchemaVersion = 1;
inline constexpr int kSoupSchemaVersion = 1;
inline constexpr int kTableSchemaVersion = 1;

/// git describe of the source tree at configure time.
std::string version();

nlohmann::json point_json(const Point& p, int d);
Point point_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ScanResult& r);
nlohmann::json to_json(const VerifyReport& r);
nlohmann::json to_json(const CapacityLimit& c);

/// Scan CSV: '#'-prefixed schema, version and parameter lines, then a header
///   param,estimate,std_error,reference,ratio,samples,tail_bound,
///   boundary_touch_rate,ci_low,ci_high,scaled,scaled_se
/// and one row per scan point. Missing values are written as "nan".
void write_scan_csv(std::ostream& os, const ScanResult& r);

/// JSON lines: a header object {"schema": "loopsoup-soup", ...}, then one
/// {"root", "length", "trace"} object per loop.
void write_soup_jsonl(std::ostream& os, const Soup& soup, const nlohmann::json& params = {});
/// Reads a dump back; throws InvalidArgument on a schema mismatch.
Soup read_soup_jsonl(std::istream& is);

/// {schema, schema_version, d, L_max, p, m_d, tail_bound}
nlohmann::json table_to_json(const LengthTable& t);
/// Rebuilds the table for (d, L_max) and checks it against the stored p_k.
LengthTable table_from_json(const nlohmann::json& j);

}  // namespace loopsoup
