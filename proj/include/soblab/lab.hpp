#ifndef SOBLAB_LAB_HPP
#define SOBLAB_LAB_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soblab/geometry.hpp"
#include "soblab/norms.hpp"

namespace soblab {

enum class CaseTag {
  MZ_GRADIENT,
  LORENTZ_SOBOLEV,
  WEAK_SOBOLEV,
  ISOPERIMETRIC_Q,
  FS_WEAK_MAX,
  SAWYER_WEAK_FRACMAX,
  STRONG_MALM,
  RIESZ_RIESZ,
  HARDY_ATOM,
  BUMP_PP,
  BUMP_PQ,
  AL_GT1,
  POWER_WEIGHT,
  GNS_CLASSICAL,
  ALVINO,
  GNS_MEASURE,
  FRAC_MZ,
  P_STAR_LOCAL_AVG,
};

std::string to_string(CaseTag tag);
CaseTag case_tag_from_string(const std::string& name);
const std::vector<CaseTag>& all_case_tags();

// Validated case descriptor. Exponent relations are enforced here; alpha may
// be NaN on input for relation-bound cases and is then derived.
struct InequalityCase {
  CaseTag tag;
  ExperimentParams params;
  int dim = 2;

  InequalityCase(CaseTag t, ExperimentParams p, int n = 2);
};

struct InequalityReport {
  std::string case_name;
  std::string params_json;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs/rhs, 0 when both vanish
  double h = 0.0;
  int levels = 0;
  double runtime_ms = 0.0;
  std::string input_digest;
  bool flagged = false;  // counterexample mode / infinite side

  nlohmann::json to_json() const;
  static InequalityReport from_json(const nlohmann::json& j);
  bool operator==(const InequalityReport& o) const;
};

// Fixed experiment corpus: smooth bumps, cones, two-bump functions and the
// standard measures (point masses, uniform disk density, |x|^{-1} annulus).
struct Corpus {
  std::vector<std::pair<std::string, GridField>> functions;
  std::vector<std::pair<std::string, Measure>> measures;

  static Corpus standard(double extent = 2.0, double h = 1.0 / 32.0);
  static GridField bump(double extent, double h, const Vec& c, double radius,
                        double amplitude);
  static GridField cone(double extent, double h, const Vec& c, double radius,
                        double amplitude = 1.0);
  static PointMeasure random_atoms(int dim, int count, double spread, Rng& rng);
};

// Cell average of (M_alpha mu)^power on the cell of the grid containing x;
// atoms inside the cell are integrated analytically over the equal-volume
// ball (the integrand is singular but integrable there).
double m_alpha_cell_average(const Measure& mu, double alpha, const GridField& grid,
                            Eigen::Index cell, double power);

// (M_alpha mu)^power at every cell of the grid: exact ball values with
// analytic atom cells for atomic measures, the cube maximal field for grid
// densities, ones for Lebesgue measure at alpha = 0.
Eigen::ArrayXd maximal_weight_cells(const Measure& mu, double alpha,
                                    const GridField& grid, double power);

InequalityReport evaluate_case(const InequalityCase& c, const GridField& u,
                               const Measure& mu);

struct SuiteSummary {
  std::map<std::string, double> max_ratio;
  std::map<std::string, int> evaluated;
};

struct SuiteResult {
  std::vector<InequalityReport> reports;
  SuiteSummary summary;
};

// Deterministic given the seed; reports in case-then-input order.
SuiteResult run_suite(const std::vector<InequalityCase>& cases, const Corpus& corpus,
                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment drivers.

struct GrowthRow {
  double R = 0.0;
  double lhs = 0.0;  // ||M_1 f||_{L^1(mu_R)}
  double rhs = 0.0;  // ||f||_{L^1(M_1 mu_R)}
};

struct GrowthTable {
  std::vector<GrowthRow> rows;
  double bump_mass = 0.0;          // total mass of f
  double expected_increment = 0.0; // 2 m log 2: the per-doubling growth of lhs
  std::vector<double> increments;  // lhs differences per R-doubling
  double rhs_top_ratio = 1.0;      // rhs(R_max) / rhs(R_max/2)
  bool lhs_diverges = false;       // increments within 20% of expected
  bool rhs_bounded = false;        // top-two rhs within 5%
};

// The strong bound without M on the right fails: f a fixed radial bump on
// B_1, mu_R the density |x|^{-1} on B_R \ B_1 (n = 2, alpha = 1). Radial
// reduction makes the quadrature exact to ~1e-3 at all R.
GrowthTable counterexample_growth(const std::vector<double>& R_list);

struct SharpnessRow {
  double x = 0.0;              // |x|
  double maximal = 0.0;        // M_{alpha,Theta}(1_B)(x)
  double maximal_ratio = 0.0;  // maximal * |x|^{n-alpha} / log^{q/p'+eps}|x|
  double integrand = 0.0;      // I-lower-bound^{p'} * maximal^{-p'/q}
  double integrand_norm = 0.0; // integrand * |x|^n log|x|
};

struct SharpnessTable {
  double epsilon = 0.0;
  std::vector<SharpnessRow> rows;
  double ratio_spread = 0.0;  // max/min of maximal_ratio over the rows
};

// Tables for the log-bump sharpness scan, one per requested epsilon.
std::vector<SharpnessTable> sharpness_scan(double q, double p, double alpha,
                                           const std::vector<double>& xs,
                                           const std::vector<double>& epsilons = {0.0, 1.0});

struct TruncationRow {
  int k = 0;
  double term = 0.0;  // 2^{kp} w({tau_k u > 2^{k-1}})^{p/q}
};

struct TruncationReport {
  std::vector<TruncationRow> rows;
  double lorentz_qp_p = 0.0;   // ||u||_{L^{q,p}(w)}^p
  double chain_rhs = 0.0;      // c_{p,q} * sum of terms
  double c_pq = 0.0;           // (q/p) 2^{3p}
  int gradient_band_failures = 0;
  int inclusion_failures = 0;
  double rhs_gradient = 0.0;   // ||grad u||_{L^p(v)}, reported for context
  bool holds = false;
};

// Maz'ya truncation chain with the derived constant c_{p,q} = (q/p) 2^{3p}.
TruncationReport truncation_upgrade(const GridField& u, const PointFn& w,
                                    const PointFn& v, double p, double q);

struct ScalingReport {
  double q = 0.0;                  // p*/n'
  double lhs_endpoint = 0.0;       // || |u|^q ||_{L^{n'}(w)}
  double mid_gradient = 0.0;       // int |grad(|u|^q)| w^{1-1/n}
  double chain_bound = 0.0;        // q int |u|^{q-1} |grad u| w^{1-1/n}
  double hoelder_product = 0.0;    // split of chain_bound by Hoelder
  double sobolev_ratio = 0.0;      // ||u||_{p*,w} / ||grad u||_{p, w^{1-p/n}}
  bool chain_rule_ok = false;      // mid_gradient <= chain_bound (discrete)
  bool hoelder_ok = false;         // chain_bound <= hoelder_product (exact)
};

// Numerical walk through the p = 1 -> p scaling argument.
ScalingReport scaling_p_experiment(const GridField& u, const PointFn& w, double p);

struct HardyAtomReport {
  double local = 0.0;   // int_{3B} |I_alpha a| dmu
  double global = 0.0;  // complement part
  double total = 0.0;
  double mean_residual = 0.0;  // |int a| relative to int |a|
  double sup_norm = 0.0;       // ||a||_inf * w(B), should be <= 1
};

HardyAtomReport hardy_atom_test(const Ball& b, const Measure& mu, double alpha,
                                std::uint64_t seed);

struct RieszRieszReport {
  double lhs = 0.0;  // ||I_1 f||_{L^1(mu)}
  double rhs = 0.0;  // || |Rf| ||_{L^1(M_1 mu)}
  double ratio = 0.0;
};

RieszRieszReport riesz_riesz_experiment(const GridField& f, const Measure& mu);

struct AlGt1Report {
  double lhs_direct = 0.0;    // ||I_alpha f||_{L^q(w)} by direct quadrature
  double lhs_composed = 0.0;  // same through I_{alpha-1} of I_1 f
  double agreement = 0.0;     // relative difference of the two
  double rhs = 0.0;           // || |Rf| ||_{L^1((M_Psi w)^{1 - alpha/n})}
  double rhs_a1 = 0.0;        // || |Rf| ||_{L^1(w^{1 - alpha/n})}
  double ratio = 0.0;         // lhs_direct / rhs
};

AlGt1Report al_gt1_experiment(const GridField& f, const GridField& w, double alpha,
                              double epsilon);

}  // namespace soblab

#endif
