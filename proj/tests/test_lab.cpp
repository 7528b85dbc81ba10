#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "soblab/lab.hpp"
#include "soblab/operators.hpp"

using namespace soblab;

namespace {

ExperimentParams params_nan_alpha() {
  ExperimentParams p;
  p.alpha = std::nan("");
  return p;
}

Measure dirac_at(double x, double y) {
  return Measure(PointMeasure::dirac(make_vec({x, y}), 1.0));
}

}  // namespace

TEST_CASE("case validation") {
  ExperimentParams p = params_nan_alpha();

  SUBCASE("BUMP_PP rejects p = 1 naming the field") {
    p.p = 1.0;
    p.epsilon = 0.5;
    try {
      InequalityCase c(CaseTag::BUMP_PP, p);
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("params.p") != std::string::npos);
    }
  }
  SUBCASE("alpha = n rejected") {
    p.alpha = 2.0;
    CHECK_THROWS_AS(InequalityCase(CaseTag::MZ_GRADIENT, p), ConfigError);
  }
  SUBCASE("relation-bound alpha is derived or checked") {
    p.q = 1.5;
    InequalityCase c(CaseTag::LORENTZ_SOBOLEV, p);
    CHECK(c.params.alpha == doctest::Approx(0.5).epsilon(1e-12));
    p.alpha = 0.2;  // wrong for q = 1.5
    CHECK_THROWS_AS(InequalityCase(CaseTag::LORENTZ_SOBOLEV, p), ConfigError);
  }
  SUBCASE("power weight range") {
    p = params_nan_alpha();
    p.p = 4.0 / 3.0;
    p.lambda = -2.5;
    CHECK_THROWS_AS(InequalityCase(CaseTag::POWER_WEIGHT, p), ConfigError);
    p.lambda = 1.0;
    CHECK_NOTHROW(InequalityCase(CaseTag::POWER_WEIGHT, p));
  }
}

TEST_CASE("report serialization round-trips") {
  ExperimentParams p = params_nan_alpha();
  InequalityCase c(CaseTag::MZ_GRADIENT, p);
  GridField u = Corpus::bump(1.0, 1.0 / 16.0, make_vec({0.0, 0.0}), 0.6, 1.0);
  InequalityReport r = evaluate_case(c, u, dirac_at(0.11, 0.07));
  InequalityReport back = InequalityReport::from_json(r.to_json());
  CHECK(back == r);
}

TEST_CASE("zero function gives zero reports") {
  GridField z = GridField::sample_box(2, 1.0, 1.0 / 16.0, FieldRole::function,
                                      [](const Vec&) { return 0.0; });
  Measure mu = dirac_at(0.1, 0.2);
  for (CaseTag tag : {CaseTag::MZ_GRADIENT, CaseTag::LORENTZ_SOBOLEV,
                      CaseTag::WEAK_SOBOLEV, CaseTag::GNS_CLASSICAL,
                      CaseTag::ISOPERIMETRIC_Q, CaseTag::FRAC_MZ}) {
    ExperimentParams p = params_nan_alpha();
    p.q = 1.5;
    InequalityCase c(tag, p);
    InequalityReport r = evaluate_case(c, z, mu);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(r.ratio == 0.0);
  }
}

TEST_CASE("MZ gradient case against the dirac closed form") {
  GridField u = Corpus::bump(2.0, 1.0 / 64.0, make_vec({0.2, -0.1}), 1.0, 1.5);
  Vec x0 = make_vec({0.1, 0.2});
  Measure mu = dirac_at(x0[0], x0[1]);
  ExperimentParams p = params_nan_alpha();
  InequalityCase c(CaseTag::MZ_GRADIENT, p);
  InequalityReport r = evaluate_case(c, u, mu);

  CHECK(r.lhs == doctest::Approx(std::abs(u.interp(x0))).epsilon(1e-12));
  // rhs = (1/v_2) int |grad u| |x - x0|^{-1} dx = 2 I_1(|grad u|)(x0)
  GridField gm = gradient_magnitude(u);
  double expected = 2.0 * riesz_potential(gm, 1.0, x0);
  CHECK(r.rhs == doctest::Approx(expected).epsilon(0.01));
  // subrepresentation makes the ratio at most v_n / gamma(1) = 1/2 here
  CHECK(r.ratio <= 0.5 * 1.01);
}

TEST_CASE("classical GNS sharpens to the Talenti constant on plateau cones") {
  ExperimentParams p = params_nan_alpha();
  InequalityCase c(CaseTag::GNS_CLASSICAL, p);
  Measure unused = dirac_at(0.0, 0.0);
  auto plateau = [](double eps) {
    return GridField::sample_box(2, 2.0, 1.0 / 128.0, FieldRole::function,
                                 [eps](const Vec& x) {
                                   return std::clamp((1.0 - x.norm()) / eps, 0.0, 1.0);
                                 });
  };
  double r3 = evaluate_case(c, plateau(0.3), unused).ratio;
  double r15 = evaluate_case(c, plateau(0.15), unused).ratio;
  double talenti_recip = 1.0 / (2.0 * std::sqrt(M_PI));
  CHECK(std::abs(r15 - talenti_recip) <= 0.05 * talenti_recip);
  CHECK(std::abs(r15 - talenti_recip) < std::abs(r3 - talenti_recip));
  // the sharp constant is an upper bound for the ratio
  CHECK(r15 <= talenti_recip * 1.001);
  CHECK(r3 <= talenti_recip * 1.001);
}

TEST_CASE("Lorentz refinement dominates the Lebesgue-scale case") {
  Corpus corpus = Corpus::standard(2.0, 1.0 / 24.0);
  ExperimentParams p = params_nan_alpha();
  p.q = 2.0;
  InequalityCase lorentz(CaseTag::LORENTZ_SOBOLEV, p);
  InequalityCase measure_gns(CaseTag::GNS_MEASURE, params_nan_alpha());
  for (const auto& [fn, u] : corpus.functions) {
    for (const auto& [mn, mu] : corpus.measures) {
      InequalityReport a = evaluate_case(lorentz, u, mu);
      InequalityReport b = evaluate_case(measure_gns, u, mu);
      // same right-hand side; the L^{q,1} left side dominates L^q
      std::vector<std::pair<double, double>> vm;
      if (mu.is_atomic()) {
        for (const auto& at : mu.atomic().atoms())
          vm.push_back({u.interp(at.location), at.mass});
      } else {
        for (Eigen::Index i = 0; i < u.cell_count(); ++i)
          if (mu.grid()[i] > 0.0)
            vm.push_back({u[i], mu.grid()[i] * u.cell_volume()});
      }
      double lq = lorentz_norm_simple(vm, 2.0, 2.0);
      CHECK(a.lhs >= lq * (1.0 - 1e-12));
      CHECK(b.rhs == doctest::Approx(a.rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("suite determinism and summary") {
  Corpus corpus = Corpus::standard(2.0, 1.0 / 16.0);
  ExperimentParams p = params_nan_alpha();
  p.q = 1.5;
  std::vector<InequalityCase> cases = {InequalityCase(CaseTag::MZ_GRADIENT, p),
                                       InequalityCase(CaseTag::WEAK_SOBOLEV, p)};
  SuiteResult a = run_suite(cases, corpus, 7);
  SuiteResult b = run_suite(cases, corpus, 7);
  REQUIRE(a.reports.size() == b.reports.size());
  CHECK(a.reports.size() == 2 * corpus.functions.size() * corpus.measures.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i] == b.reports[i]);
  for (const auto& [name, ratio] : a.summary.max_ratio) {
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.0);
  }
  SuiteResult empty = run_suite({}, corpus, 7);
  CHECK(empty.reports.empty());
}

TEST_CASE("suite max ratios are finite and refinement-stable") {
  // cheap cases on the full corpus
  {
    ExperimentParams p = params_nan_alpha();
    p.q = 1.5;
    p.alpha = std::nan("");
    std::vector<InequalityCase> cases;
    for (CaseTag t : {CaseTag::MZ_GRADIENT, CaseTag::LORENTZ_SOBOLEV,
                      CaseTag::WEAK_SOBOLEV, CaseTag::STRONG_MALM,
                      CaseTag::FS_WEAK_MAX, CaseTag::GNS_MEASURE,
                      CaseTag::SAWYER_WEAK_FRACMAX, CaseTag::ISOPERIMETRIC_Q})
      cases.emplace_back(t, p);
    SuiteResult coarse = run_suite(cases, Corpus::standard(2.0, 1.0 / 16.0), 1);
    SuiteResult fine = run_suite(cases, Corpus::standard(2.0, 1.0 / 32.0), 1);
    for (const auto& [name, r16] : coarse.summary.max_ratio) {
      double r32 = fine.summary.max_ratio.at(name);
      CHECK(std::isfinite(r16));
      CHECK(std::isfinite(r32));
      CHECK(std::abs(r32 - r16) <= 0.10 * std::max(r16, r32));
    }
  }
  // expensive cases on a trimmed corpus (two functions, two measures)
  {
    auto trim = [](Corpus c) {
      c.functions.erase(c.functions.begin() + 2, c.functions.end());
      std::vector<std::pair<std::string, Measure>> keep;
      keep.push_back(c.measures[0]);  // dirac
      keep.push_back(c.measures[2]);  // disk density
      c.measures = std::move(keep);
      return c;
    };
    ExperimentParams p = params_nan_alpha();
    p.p = 1.5;
    p.q = 2.0;
    p.s = 0.5;
    p.epsilon = 0.5;
    std::vector<InequalityCase> cases;
    for (CaseTag t : {CaseTag::RIESZ_RIESZ, CaseTag::FRAC_MZ, CaseTag::BUMP_PQ,
                      CaseTag::BUMP_PP, CaseTag::P_STAR_LOCAL_AVG,
                      CaseTag::POWER_WEIGHT, CaseTag::GNS_CLASSICAL, CaseTag::ALVINO})
      cases.emplace_back(t, [&] {
        ExperimentParams q = p;
        if (t == CaseTag::POWER_WEIGHT) q.lambda = 0.5;
        return q;
      }());
    SuiteResult coarse = run_suite(cases, trim(Corpus::standard(2.0, 1.0 / 16.0)), 1);
    SuiteResult fine = run_suite(cases, trim(Corpus::standard(2.0, 1.0 / 24.0)), 1);
    for (const auto& [name, rc] : coarse.summary.max_ratio) {
      double rf = fine.summary.max_ratio.at(name);
      CHECK(std::isfinite(rc));
      CHECK(std::isfinite(rf));
      CHECK(std::abs(rf - rc) <= 0.10 * std::max(rc, rf));
    }
  }
}

TEST_CASE("counterexample growth table") {
  GrowthTable t = counterexample_growth({1.0, 4.0, 8.0, 16.0, 32.0});
  REQUIRE(t.rows.size() == 5);
  CHECK(t.rows[0].lhs == 0.0);  // empty annulus at R = 1
  // lhs grows by about 2 m log 2 per doubling
  REQUIRE(t.increments.size() == 3);
  for (double inc : t.increments)
    CHECK(std::abs(inc - t.expected_increment) <= 0.2 * t.expected_increment);
  CHECK(t.lhs_diverges);
  // rhs is bounded: the top two R values differ by < 5 percent
  CHECK(t.rhs_bounded);
  CHECK(std::abs(t.rhs_top_ratio - 1.0) < 0.05);
  // the two sides together witness the failure of the strong bound without
  // the extra maximal function: lhs/rhs grows with R
  double ratio_small = t.rows[1].lhs / t.rows[1].rhs;
  double ratio_big = t.rows.back().lhs / t.rows.back().rhs;
  CHECK(ratio_big > 1.5 * ratio_small);
}

TEST_CASE("sharpness scan") {
  std::vector<double> xs = {8, 16, 32, 64, 128, 256, 512};
  auto tables = sharpness_scan(2.0, 2.0, 0.0, xs, {0.0, 1.0});
  REQUIRE(tables.size() == 2);
  const SharpnessTable& t0 = tables[0];
  const SharpnessTable& t1 = tables[1];
  REQUIRE(t0.rows.size() == xs.size());
  CHECK(t0.rows.front().x == 8.0);

  // normalized maximal ratio stays within a factor 4 band for eps = 0
  CHECK(t0.ratio_spread <= 4.0);

  // closed-form divergent integrand bound: value * |x|^n log|x| is bounded
  // below by (|x|/(1+|x|))^{(n-beta)p'}
  for (const auto& row : t0.rows) {
    double c = std::pow(8.0 / 9.0, 4.0);  // (n-beta)p' = 4 at p=q=2, alpha=0
    double closed = std::pow(row.x, 2.0) / std::pow(1.0 + row.x, 4.0) / std::log(row.x);
    CHECK(closed * row.x * row.x * std::log(row.x) >= c * 0.999);
  }

  // the log bump with eps = 1 strictly shrinks the normalized integrand at
  // the far end, with a decreasing trend
  CHECK(t1.rows.back().integrand_norm < t0.rows.back().integrand_norm);
  CHECK(t1.rows.back().integrand_norm < t1.rows.front().integrand_norm);
}

TEST_CASE("truncation chain") {
  auto ones = [](const Vec&) { return 1.0; };
  GridField cone = Corpus::cone(2.0, 1.0 / 48.0, make_vec({0.0, 0.0}), 1.0);

  SUBCASE("holds with the derived constant for the pinned exponent pairs") {
    for (auto [p, q] : std::vector<std::pair<double, double>>{{1, 2}, {2, 2}, {2, 3}}) {
      TruncationReport r = truncation_upgrade(cone, ones, ones, p, q);
      CHECK(r.c_pq == doctest::Approx((q / p) * std::pow(2.0, 3.0 * p)));
      CHECK(r.gradient_band_failures == 0);
      CHECK(r.inclusion_failures == 0);
      CHECK(r.holds);
      CHECK(r.rhs_gradient > 0.0);
    }
  }
  SUBCASE("dyadic rescaling shifts the chain exactly") {
    TruncationReport base = truncation_upgrade(cone, ones, ones, 2.0, 3.0);
    GridField doubled = cone;
    doubled.values() *= 2.0;
    TruncationReport shifted = truncation_upgrade(doubled, ones, ones, 2.0, 3.0);
    CHECK(shifted.lorentz_qp_p ==
          doctest::Approx(std::pow(2.0, 2.0) * base.lorentz_qp_p).epsilon(1e-12));
    CHECK(shifted.chain_rhs ==
          doctest::Approx(std::pow(2.0, 2.0) * base.chain_rhs).epsilon(1e-12));
    CHECK(shifted.holds);
  }
  SUBCASE("corpus functions all pass") {
    Corpus corpus = Corpus::standard(2.0, 1.0 / 24.0);
    for (const auto& [name, u] : corpus.functions) {
      TruncationReport r = truncation_upgrade(u, ones, ones, 2.0, 2.0);
      CHECK(r.gradient_band_failures == 0);
      CHECK(r.inclusion_failures == 0);
      CHECK(r.holds);
    }
  }
}

TEST_CASE("p = 1 to p scaling chain") {
  GridField u = Corpus::bump(2.0, 1.0 / 64.0, make_vec({0.0, 0.0}), 1.0, 1.7);
  SUBCASE("unweighted") {
    ScalingReport r = scaling_p_experiment(u, [](const Vec&) { return 1.0; }, 4.0 / 3.0);
    CHECK(r.q == doctest::Approx(2.0));  // p* / n' = 4/2
    CHECK(r.chain_rule_ok);
    CHECK(r.hoelder_ok);
    CHECK(std::isfinite(r.sobolev_ratio));
    CHECK(r.sobolev_ratio > 0.0);
  }
  SUBCASE("admissible power weight") {
    ScalingReport r = scaling_p_experiment(
        u, [](const Vec& x) { return std::pow(x.norm() + 1e-12, 0.5); }, 4.0 / 3.0);
    CHECK(r.chain_rule_ok);
    CHECK(r.hoelder_ok);
    CHECK(std::isfinite(r.sobolev_ratio));
  }
  SUBCASE("zero function") {
    GridField z = GridField::sample_box(2, 1.0, 1.0 / 16.0, FieldRole::function,
                                        [](const Vec&) { return 0.0; });
    ScalingReport r = scaling_p_experiment(z, [](const Vec&) { return 1.0; }, 4.0 / 3.0);
    CHECK(r.lhs_endpoint == 0.0);
    CHECK(r.sobolev_ratio == 0.0);
  }
}

TEST_CASE("hardy atoms") {
  Measure mu(GridField::sample_box(2, 2.0, 1.0 / 32.0, FieldRole::density,
                                   [](const Vec& x) {
                                     return (x - make_vec({-0.8, -0.6})).norm() < 0.9 ? 1.0
                                                                                      : 0.0;
                                   }));
  double alpha = 0.3;
  std::vector<double> scale_max(3, 0.0), scale_min(3, kInf);
  std::vector<double> radii = {0.25, 0.5, 1.0};
  for (std::size_t s = 0; s < radii.size(); ++s) {
    for (int atom = 0; atom < 20; ++atom) {
      Ball b(make_vec({0.6, 0.5}), radii[s]);
      HardyAtomReport r = hardy_atom_test(b, mu, alpha, 1000 + atom);
      CHECK(r.mean_residual <= 1e-12);
      CHECK(r.sup_norm <= 1.0 + 1e-9);
      CHECK(std::isfinite(r.total));
      scale_max[s] = std::max(scale_max[s], r.total);
      scale_min[s] = std::min(scale_min[s], r.total);
    }
  }
  double hi = *std::max_element(scale_max.begin(), scale_max.end());
  double lo = *std::min_element(scale_max.begin(), scale_max.end());
  CHECK(hi / lo <= 2.0);  // scale drift of the per-scale maxima
}

TEST_CASE("riesz-riesz endpoint experiment") {
  GridField f = Corpus::bump(2.0, 1.0 / 48.0, make_vec({0.0, 0.0}), 1.0, 1.0);
  SUBCASE("zero function") {
    GridField z = GridField::sample_box(2, 1.0, 1.0 / 16.0, FieldRole::function,
                                        [](const Vec&) { return 0.0; });
    RieszRieszReport r = riesz_riesz_experiment(z, dirac_at(0.1, 0.0));
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(r.ratio == 0.0);
  }
  SUBCASE("point mass at the bump center") {
    Measure mu = dirac_at(0.0, 0.0);
    RieszRieszReport r = riesz_riesz_experiment(f, mu);
    CHECK(r.lhs == doctest::Approx(riesz_potential(f, 1.0, make_vec({0.0, 0.0})))
                       .epsilon(1e-12));
    CHECK(std::isfinite(r.rhs));
    CHECK(r.rhs > 0.0);
  }
  SUBCASE("disk density stays in the subrepresentation regime") {
    Measure mu(GridField::sample_box(2, 2.0, 1.0 / 48.0, FieldRole::density,
                                     [](const Vec& x) { return x.norm() < 1.2 ? 1.0 : 0.0; }));
    RieszRieszReport r = riesz_riesz_experiment(f, mu);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio < 2.0);
  }
}

TEST_CASE("alpha above one endpoint experiment") {
  GridField f = Corpus::bump(1.25, 1.0 / 32.0, make_vec({0.0, 0.0}), 1.0, 1.0);
  GridField w = GridField::sample_box(2, 3.0, 1.0 / 8.0, FieldRole::weight,
                                      [](const Vec& x) { return x.norm() < 2.0 ? 1.0 : 0.0; });
  AlGt1Report r = al_gt1_experiment(f, w, 1.5, 0.5);
  CHECK(r.agreement <= 0.03);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.ratio > 0.0);
  CHECK(r.rhs_a1 > 0.0);
  CHECK(r.rhs >= r.rhs_a1 * 0.99);  // the bumped maximal weight dominates w

  GridField z = GridField::sample_box(2, 1.0, 1.0 / 16.0, FieldRole::function,
                                      [](const Vec&) { return 0.0; });
  AlGt1Report rz = al_gt1_experiment(z, w, 1.5, 0.5);
  CHECK(rz.lhs_direct == 0.0);
  CHECK(rz.rhs == 0.0);

  ExperimentParams p = params_nan_alpha();
  p.alpha = 0.8;
  p.epsilon = 0.5;
  CHECK_THROWS_AS(InequalityCase(CaseTag::AL_GT1, p), ConfigError);
}

TEST_CASE("strong M bound holds while its M-free variant fails") {
  // the inequality with the extra maximal function on the right holds on the
  // corpus; the growth driver already witnesses the divergence without it
  Corpus corpus = Corpus::standard(2.0, 1.0 / 24.0);
  ExperimentParams p = params_nan_alpha();
  p.alpha = 1.0;
  InequalityCase c(CaseTag::STRONG_MALM, p);
  double worst = 0.0;
  for (const auto& [fn, u] : corpus.functions)
    for (const auto& [mn, mu] : corpus.measures)
      worst = std::max(worst, evaluate_case(c, u, mu).ratio);
  CHECK(std::isfinite(worst));
  CHECK(worst > 0.0);
}
