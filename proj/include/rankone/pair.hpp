#pragma once

// Planning of a pair (S, T) of rank-one maps whose tracked correlations
// vanish exactly on the I-intervals (for S) and on the J-intervals (for T) of
// a schedule, so that the product correlation (f, S^n f)(g, T^n g) vanishes
// on every covered n. Generic stages (rigidity, polynomial limits) are
// placed in the free windows Ĩ_k (for S) and J̃_k (for T).

#include "rankone/correlation.hpp"
#include "rankone/schedule.hpp"

#include <map>
#include <optional>

namespace rankone {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sum_z a_z T^z with a_z >= 0. Realized by spacer histograms, which act as
/// T^{-z}; only z >= 0 can be realized.
struct PolynomialSpec {
  std::map<std::int64_t, Rational> coefficients;

  static PolynomialSpec delta(std::int64_t z = 0);
  Rational mass() const;
  bool is_delta_zero() const;
  /// Throws std::invalid_argument on negative weights, negative z, mass > 1,
  /// or (probability mode) mass != 1.
  void validate(bool probability_space = false) const;
  bool operator==(const PolynomialSpec&) const = default;
};

/// Column counts realizing a polynomial with a given number of cuts.
struct SpacerHistogram {
  std::map<std::int64_t, std::int64_t> counts;  ///< spacer value -> columns
  std::int64_t escape_columns = 0;              ///< columns carrying the escape filler
  Rational rounding_mass;  ///< sum |count/cuts - a_z| including the escape weight
};

/// Largest-remainder rounding of {a_z} ∪ {1 - mass} to `cuts` columns.
SpacerHistogram realize_histogram(const PolynomialSpec& poly, std::int64_t cuts);

/// Spacers large enough that every new occurrence distance exceeds
/// max(forbidden). `span` is the largest distance already present in the
/// tracked support (0 when it is a single level).
StageSpec design_blocking_stage(std::int64_t current_height, const Interval& forbidden,
                                std::int64_t cuts, std::int64_t span = 0);

/// A stage whose spacer multiset realizes `poly`: value z on round(a_z*cuts)
/// columns, the escape filler (current_height) on the columns accounting for
/// 1 - mass. The resulting height and the largest new distance must fit
/// below max(budget).
StageSpec design_generic_stage(std::int64_t current_height, const Interval& budget,
                               const PolynomialSpec& poly, std::int64_t cuts, std::int64_t span = 0);

struct PairPolicy {
  std::int64_t blocking_cuts = 2;
  std::vector<std::int64_t> generic_cuts{2};       ///< cycled over generic stages
  std::vector<PolynomialSpec> generic_polys{PolynomialSpec::delta(0)};  ///< cycled
  std::int64_t max_generic_per_window = 4;
  std::int64_t base_height = 1;
  std::size_t tracked_stage = 1;  ///< f, g = base indicators of this depth
};

enum class StageKind { blocking, generic, terminal };

struct StageLedgerEntry {
  std::size_t stage = 0;
  StageKind kind = StageKind::blocking;
  std::int64_t height_before = 0;
  std::int64_t min_new_distance = 0;  ///< smallest cross-column distance created
  std::int64_t max_distance = 0;      ///< largest distance in the tracked support afterwards
};

struct ZeroClaim {
  Interval interval;
  bool exact_zero = true;
  std::optional<std::int64_t> first_violation;
};

struct RigidityClaim {
  std::size_t stage = 0;
  std::int64_t time = 0;
  std::int64_t cuts = 0;
  Rational correlation;  ///< exact (f, R^time f) when exact, else its lower bound
  Rational target;       ///< (1 - 1/cuts) ||f||^2
  bool in_window = true;
};

struct PolynomialClaim {
  std::size_t stage = 0;
  std::int64_t time = 0;
  std::int64_t cuts = 0;
  PolynomialSpec poly;
  Rational deviation_bound;
  Rational slack;  ///< c/cuts + rounding mass, with c = 2
};

struct ConstructionCertificate {
  std::string factor;  ///< "S" or "T"
  LevelFunction tracked;
  std::int64_t horizon = 0;
  std::vector<ZeroClaim> zero_intervals;
  std::vector<RigidityClaim> rigidity_times;
  std::vector<PolynomialClaim> polynomial_claims;
  std::vector<StageLedgerEntry> min_distance_ledger;
  std::vector<std::string> unverified;
};

struct PairPlan {
  RankOneSpec spec_s;
  RankOneSpec spec_t;
  ConstructionCertificate cert_s;
  ConstructionCertificate cert_t;
  std::int64_t n0 = 1;  ///< product correlation vanishes on [n0, horizon]
  CorrelationSequence corr_s;  ///< exact on [0, horizon]
  CorrelationSequence corr_t;
};

PairPlan plan_pair(const IntervalSchedule& schedule, const PairPolicy& policy = {});

struct PolynomialCheck {
  Bracket power;       ///< (f, T^time g)
  Bracket polynomial;  ///< sum_z a_z (f, T^{-z} g)
  Rational deviation_bound;
  Rational norm_product_sq;  ///< ||f||^2 ||g||^2
  Rational slack;            ///< 2/cuts + rounding mass
  /// deviation_bound <= ||f|| ||g|| * slack, decided exactly on squares.
  bool within_allowance() const {
    return deviation_bound * deviation_bound <= norm_product_sq * slack * slack;
  }
};

/// Throws PlanError when `time` is not the height at which a stage realizing
/// `poly` starts.
PolynomialCheck verify_polynomial_limit(const RankOneSpec& spec, std::int64_t time,
                                        const PolynomialSpec& poly, const LevelFunction& f,
                                        const LevelFunction& g);

struct CertificateCheck {
  bool ok = true;
  std::string message;
  std::optional<std::int64_t> first_violated_n;
};

/// Re-runs the correlation module on every claim of the certificate.
CertificateCheck verify_certificate(const RankOneSpec& spec, const ConstructionCertificate& cert);

std::string to_string(StageKind kind);
StageKind parse_stage_kind(const std::string& s);

}  // namespace rankone
