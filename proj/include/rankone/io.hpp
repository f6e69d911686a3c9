#pragma once

// JSON documents for specs, schedules, certificates and Walsh polynomials,
// plus the tab-separated correlation table. Rationals are "num/den" strings
// (integers are also accepted on input), so round trips are lossless.
// Decoding errors carry the JSON path of the offending field.

#include "rankone/pair.hpp"
#include "rankone/schedule.hpp"
#include "rankone/spectral.hpp"
#include "rankone/suspension.hpp"
#include "rankone/walsh.hpp"

#include "json.hpp"

#include <filesystem>

namespace rankone {

using Json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json rational_json(const Rational& q);
Rational rational_from(const Json& j, const std::string& path);

Json to_json(const Interval& iv);
Json to_json(const RankOneSpec& spec);
Json to_json(const IntervalSchedule& s);
Json to_json(const LevelFunction& f);
Json to_json(const PolynomialSpec& p);
Json to_json(const PairPolicy& p);
Json to_json(const ConstructionCertificate& c);
Json to_json(const CertificateCheck& c);
Json to_json(const WalshPolynomial& p);
Json to_json(const SummabilityReport& r);
Json to_json(const CovarianceEstimate& e);
Json to_json(const SimulationConfig& c);

Interval interval_from(const Json& j, const std::string& path = "$");
RankOneSpec spec_from(const Json& j, const std::string& path = "$");
IntervalSchedule schedule_from(const Json& j, const std::string& path = "$");
LevelFunction level_function_from(const Json& j, const std::string& path = "$");
PolynomialSpec polynomial_from(const Json& j, const std::string& path = "$");
PairPolicy policy_from(const Json& j, const std::string& path = "$");
ConstructionCertificate certificate_from(const Json& j, const std::string& path = "$");
WalshPolynomial walsh_from(const Json& j, const std::string& path = "$");
SimulationConfig simulation_config_from(const Json& j, const std::string& path = "$");

/// Parses a JSON file; syntax errors report line and column.
Json read_json_file(const std::filesystem::path& file);
std::string read_text_file(const std::filesystem::path& file);
/// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& file, const std::string& content);

/// Inverse of to_table(CorrelationSequence); rows must be consecutive in n.
CorrelationSequence parse_table(const std::string& text);

}  // namespace rankone
