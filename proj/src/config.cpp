#include "soblab/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "soblab/report_io.hpp"

namespace soblab {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key \"" + path + key + "\"");
  }
}

double get_num(const nlohmann::json& j, const std::string& key, double fallback,
               const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError("field \"" + path + key + "\" must be a number");
  return j.at(key).get<double>();
}

}  // namespace

GridField RunConfig::build_function() const {
  if (function.kind == "bump")
    return Corpus::bump(grid_extent, grid_h, function.center, function.radius,
                        function.amplitude);
  if (function.kind == "cone")
    return Corpus::cone(grid_extent, grid_h, function.center, function.radius,
                        function.amplitude);
  if (function.kind == "two_bump") {
    GridField a = Corpus::bump(grid_extent, grid_h, function.center, function.radius,
                               function.amplitude);
    GridField b = Corpus::bump(grid_extent, grid_h, -function.center, function.radius,
                               function.amplitude);
    a.values() += b.values();
    return a;
  }
  throw ConfigError("unknown function.kind \"" + function.kind + "\"");
}

Measure RunConfig::build_measure() const {
  if (measure) return *measure;
  return Measure(PointMeasure(
      2, {{make_vec({-0.7, 0.1}), 1.0}, {make_vec({0.6, -0.4}), 2.0}}));
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(j, std::filesystem::path(path).parent_path().string());
}

RunConfig parse_config_json(const nlohmann::json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j, {"dimension", "grid", "measure", "weight", "cases", "params",
                 "function", "seed", "out", "growth", "sharpness"},
             "");

  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (j.contains("dimension")) cfg.dimension = j.at("dimension").get<int>();
  if (cfg.dimension != 2)
    throw ConfigError("field \"dimension\" must be 2 for the inequality catalog");

  if (j.contains("grid")) {
    check_keys(j.at("grid"), {"h", "extent"}, "grid.");
    cfg.grid_h = get_num(j.at("grid"), "h", cfg.grid_h, "grid.");
    cfg.grid_extent = get_num(j.at("grid"), "extent", cfg.grid_extent, "grid.");
    if (cfg.grid_h <= 0.0) throw ConfigError("field \"grid.h\" must be positive");
    if (cfg.grid_extent <= 2.0 * cfg.grid_h)
      throw ConfigError("field \"grid.extent\" must exceed 2h");
  }

  ExperimentParams p;
  p.alpha = std::nan("");
  if (j.contains("params")) {
    const auto& jp = j.at("params");
    check_keys(jp, {"p", "q", "alpha", "beta", "s", "epsilon", "lambda"}, "params.");
    p.p = get_num(jp, "p", p.p, "params.");
    p.q = get_num(jp, "q", p.q, "params.");
    p.alpha = get_num(jp, "alpha", p.alpha, "params.");
    p.beta = get_num(jp, "beta", p.beta, "params.");
    p.s = get_num(jp, "s", p.s, "params.");
    p.epsilon = get_num(jp, "epsilon", p.epsilon, "params.");
    p.lambda = get_num(jp, "lambda", p.lambda, "params.");
  }
  cfg.params = p;

  if (j.contains("cases")) {
    if (!j.at("cases").is_array())
      throw ConfigError("field \"cases\" must be an array of case tags");
    for (const auto& jc : j.at("cases"))
      cfg.cases.emplace_back(case_tag_from_string(jc.get<std::string>()), p,
                             cfg.dimension);
  }

  if (j.contains("measure")) cfg.measure = measure_from_json(j.at("measure"), base_dir);
  if (j.contains("weight")) {
    Measure w = measure_from_json(j.at("weight"), base_dir);
    if (!w.is_grid())
      throw ConfigError("field \"weight\" must be a grid weight");
    cfg.weight = std::move(w);
  }

  if (j.contains("function")) {
    const auto& jf = j.at("function");
    check_keys(jf, {"kind", "center", "radius", "amplitude"}, "function.");
    if (jf.contains("kind")) cfg.function.kind = jf.at("kind").get<std::string>();
    if (jf.contains("center")) {
      cfg.function.center = make_vec({jf.at("center")[0].get<double>(),
                                      jf.at("center")[1].get<double>()});
    }
    cfg.function.radius = get_num(jf, "radius", cfg.function.radius, "function.");
    cfg.function.amplitude =
        get_num(jf, "amplitude", cfg.function.amplitude, "function.");
    if (cfg.function.radius <= 0.0)
      throw ConfigError("field \"function.radius\" must be positive");
  }

  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();

  if (j.contains("growth")) {
    check_keys(j.at("growth"), {"R"}, "growth.");
    if (j.at("growth").contains("R")) {
      cfg.growth_R.clear();
      for (const auto& r : j.at("growth").at("R")) cfg.growth_R.push_back(r.get<double>());
    }
  }
  if (j.contains("sharpness")) {
    check_keys(j.at("sharpness"), {"x", "epsilons"}, "sharpness.");
    if (j.at("sharpness").contains("x")) {
      cfg.sharpness_x.clear();
      for (const auto& r : j.at("sharpness").at("x"))
        cfg.sharpness_x.push_back(r.get<double>());
    }
    if (j.at("sharpness").contains("epsilons")) {
      cfg.sharpness_eps.clear();
      for (const auto& r : j.at("sharpness").at("epsilons"))
        cfg.sharpness_eps.push_back(r.get<double>());
    }
  }
  return cfg;
}

namespace {

InequalityReport synthetic_report(const std::string& name, const nlohmann::json& params,
                                  double lhs, double rhs, double ratio) {
  InequalityReport r;
  r.case_name = name;
  r.params_json = params.dump();
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = ratio;
  r.input_digest = "";
  return r;
}

void emit(const std::string& dir, const std::string& stem,
          const std::vector<InequalityReport>& reports, const std::string& format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("cannot create output directory: " + dir);
  if (format == "csv" || format == "both")
    write_reports_csv(dir + "/" + stem + ".csv", reports);
  if (format == "json" || format == "both")
    write_reports_json(dir + "/" + stem + ".json", reports);
}

}  // namespace

int run_command(const RunConfig& cfg, Command cmd, const std::string& out_override,
                const std::string& format) {
  std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;
  bool invariant_failed = false;

  switch (cmd) {
    case Command::run: {
      if (cfg.cases.empty()) throw ConfigError("run: \"cases\" must be nonempty");
      GridField u = cfg.build_function();
      std::vector<InequalityReport> reports;
      for (const auto& c : cfg.cases) {
        Measure mu = cfg.build_measure();
        if (cfg.weight &&
            (c.tag == CaseTag::FS_WEAK_MAX || c.tag == CaseTag::SAWYER_WEAK_FRACMAX ||
             c.tag == CaseTag::BUMP_PP || c.tag == CaseTag::BUMP_PQ ||
             c.tag == CaseTag::AL_GT1))
          mu = *cfg.weight;
        InequalityReport r = evaluate_case(c, u, mu);
        if (r.flagged) invariant_failed = true;
        reports.push_back(std::move(r));
      }
      emit(out_dir, "run", reports, format);
      break;
    }
    case Command::suite: {
      if (cfg.cases.empty()) throw ConfigError("suite: \"cases\" must be nonempty");
      Corpus corpus = Corpus::standard(cfg.grid_extent, cfg.grid_h);
      SuiteResult res = run_suite(cfg.cases, corpus, cfg.seed);
      for (const auto& r : res.reports)
        if (r.flagged || !std::isfinite(r.ratio)) invariant_failed = true;
      emit(out_dir, "suite", res.reports, format);
      break;
    }
    case Command::growth: {
      GrowthTable t = counterexample_growth(cfg.growth_R);
      std::vector<InequalityReport> reports;
      for (const auto& row : t.rows) {
        nlohmann::json params{{"R", row.R}, {"alpha", 1.0}};
        reports.push_back(synthetic_report("GROWTH", params, row.lhs, row.rhs,
                                           row.rhs == 0.0 ? 0.0 : row.lhs / row.rhs));
      }
      emit(out_dir, "growth", reports, format);
      if (!t.lhs_diverges || !t.rhs_bounded) invariant_failed = true;
      break;
    }
    case Command::sharpness: {
      auto tables = sharpness_scan(cfg.params.q, cfg.params.p,
                                   std::isnan(cfg.params.alpha) ? 0.0 : cfg.params.alpha,
                                   cfg.sharpness_x, cfg.sharpness_eps);
      std::vector<InequalityReport> reports;
      for (const auto& tab : tables) {
        for (const auto& row : tab.rows) {
          nlohmann::json params{{"q", cfg.params.q},
                                {"p", cfg.params.p},
                                {"epsilon", tab.epsilon},
                                {"x", row.x}};
          reports.push_back(synthetic_report("SHARPNESS", params, row.maximal,
                                             row.integrand_norm, row.maximal_ratio));
        }
        if (tab.epsilon == 0.0 && tab.ratio_spread > 4.0) invariant_failed = true;
      }
      emit(out_dir, "sharpness", reports, format);
      break;
    }
  }
  return invariant_failed ? 2 : 0;
}

}  // namespace soblab
