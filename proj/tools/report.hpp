#pragma once

// JSON records for the command-line reports.

#include <json.hpp>
#include <ostream>
#include <string>

#include "gmsphere/search.hpp"
#include "gmsphere/verify.hpp"

namespace gmsphere::report {

using nlohmann::json;

json to_json(const Quaternion& q);
json to_json(const ImQuaternion& v);
json to_json(const AlgebraElement& x);
json to_json(const GroupElement& g);
json to_json(const MetricParams& m);
json to_json(const ZResiduals& r);
json to_json(const ZWitness& w);
json to_json(const ZClassification& c);
json to_json(const MinResult& r);
json to_json(const Calibration& c);
json to_json(const ScanPoint& p);
json summary(const ScanReport& r);
json to_json(const Check& c);

/// Reproducibility header: version, config echo, seed, tolerance set.
json header(const std::string& command, const json& config, std::uint64_t seed, double tol_zero);

/// Fixed CSV layout of scan records.
std::string csv_header();
std::string csv_row(const ScanPoint& p);

}  // namespace gmsphere::report
