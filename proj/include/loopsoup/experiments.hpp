#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "loopsoup/greens.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CampaignParams {
  int dim = 5;
  double alpha = 0.2;
  const LengthTable* table = nullptr;
  const GreenTable* green = nullptr;
  uint64_t samples = 100000;
  uint64_t seed = 1;
};

struct ScanRow {
  double param = 0.0;       // n, |x| or m depending on the scan
  Estimate est;
  double reference = kNaN;  // theory value, computed at run time
  double ratio = kNaN;      // estimate / reference
  double ci_low = kNaN;
  double ci_high = kNaN;
  double scaled = kNaN;     // estimate times the scan's normalizing power
  double scaled_se = kNaN;
};

struct ScanResult {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<ScanRow> rows;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> notes;
};

struct Check {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double std_error = 0.0;
  double tolerance_sigmas = 4.0;
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
};

/// E[Cap(C_0 u {0})] over independent origin clusters. Clusters that leave
/// the interior of B_window are counted as boundary touches; a touch rate of
/// 1% or more throws NumericalError. Touching replicas enter with the
/// capacity of their truncated cluster, so the value is a lower bracket;
/// diag.upper is only set (to the value) when nothing touched.
Estimate expected_cluster_capacity(const CampaignParams& p, int window_radius);

/// First-order coefficient of E[Cap] in alpha:
///   sum_k w_k E_k[#R (Cap(R) - Cap({0}))],
/// from single loops with lengths drawn from the truncated length law.
Estimate one_loop_capacity_slope(const LengthTable& table, const GreenTable& green, uint64_t samples,
                                 uint64_t seed);

struct CapacityLimit {
  std::vector<double> alphas;
  std::vector<Estimate> estimates;
  PolyFit fit;             // E[Cap] ~ a + b alpha + c alpha^2
  double reference = 0.0;  // 1 / G(0)
  double z = 0.0;          // (a - reference) / se(a)
};

/// Runs expected_cluster_capacity over alphas and extrapolates to alpha = 0.
CapacityLimit capacity_alpha_limit(CampaignParams p, const std::vector<double>& alphas, int window_radius,
                                   int degree = 2);

/// P(0 <-> dB_n) per n. Reference alpha C_d E[Cap] / n^{d-2}, with E[Cap]
/// estimated from capacity_samples fresh clusters. scaled = n^{d-2} P.
/// summary carries the localization frequency among successes: removing one
/// loop leaves C_0 inside B_{ceil(n/2)}.
ScanResult one_arm_scan(const CampaignParams& p, const std::vector<int>& n_list, uint64_t capacity_samples);

/// P(0 <-> r e_1) per r. Reference alpha C_d^2 E[Cap]^2 / r^{2d-4};
/// scaled = r^{2d-4} P.
ScanResult two_point_scan(const CampaignParams& p, const std::vector<int>& r_list, uint64_t capacity_samples);

struct MeckeParams {
  double alpha = 0.5;
  const LengthTable* table = nullptr;
  int window_radius = 2;
  uint64_t samples = 100000;
  uint64_t draws_per_sample = 16;  // independent loops from mu/M per soup
  uint64_t seed = 1;
};
VerifyReport verify_mecke(const MeckeParams& p);

struct FkgParams {
  double alpha = 0.5;
  const LengthTable* table = nullptr;
  uint64_t samples = 20000;
  uint64_t seed = 1;
};
/// Pairs: two perpendicular edges at 0; one_arm(2) with two_point(e_1); and
/// edges at 0 and at (L_max + 2) e_1, which no loop can both traverse.
VerifyReport verify_fkg(const FkgParams& p);

enum class LemmaKind { kSingleLoop, kTwoSets, kFarConnect, kShortLoops };
LemmaKind parse_lemma_kind(const std::string& s);
std::string to_string(LemmaKind k);

struct LemmaParams {
  int dim = 3;
  std::vector<int> grid;     // n, |x| or m
  uint64_t samples = 100000;
  uint64_t seed = 1;
  int64_t kill_radius = 0;   // 0: default
  int far_point = 2;         // far_connect: x = far_point * e_1
  int short_m = 2;           // short_loops: diameter cutoff m; grid holds n
  double alpha = 1.0;        // short_loops activity
  const LengthTable* table = nullptr;  // short_loops only
  const GreenTable* green = nullptr;
};

/// single_loop: mu[{0} <-> dB_n] first term vs C_d Cap({0}) n^{2-d}.
/// two_sets: mu[{0} <-> {x}] first term vs C_d^2 Cap({0})^2 |x|^{4-2d}, with
///   the exact value (G(x)/G(0))^2 in diag.extra "exact_first_term".
/// far_connect: connection mass of 0 and x through dB_m, scaled by
///   m^{d-2} |x|^{d-2}.
/// short_loops: P(0 <-> dB_n using loops of diameter <= m) with a log-linear
///   fit in n/m (summary "slope").
ScanResult lemma_scan(LemmaKind kind, const LemmaParams& p);

}  // namespace loopsoup
