#include "soblab/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace soblab {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

// splits one CSV line honoring quoted fields
std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::string csv_header() {
  return "case,params_json,lhs,rhs,ratio,h,levels,runtime_ms,input_digest";
}

std::string report_csv_row(const InequalityReport& r) {
  std::ostringstream os;
  os << r.case_name << ',' << csv_quote(r.params_json) << ',' << fmt_double(r.lhs)
     << ',' << fmt_double(r.rhs) << ',' << fmt_double(r.ratio) << ','
     << fmt_double(r.h) << ',' << r.levels << ',' << fmt_double(r.runtime_ms) << ','
     << r.input_digest;
  return os.str();
}

void write_reports_csv(const std::string& path, const std::vector<InequalityReport>& rs) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report file: " + path);
  out << csv_header() << '\n';
  for (const auto& r : rs) out << report_csv_row(r) << '\n';
}

void write_reports_json(const std::string& path, const std::vector<InequalityReport>& rs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rs) arr.push_back(r.to_json());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report file: " + path);
  out << arr.dump(2) << '\n';
}

std::vector<InequalityReport> read_reports_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read report file: " + path);
  nlohmann::json arr = nlohmann::json::parse(in);
  std::vector<InequalityReport> rs;
  for (const auto& j : arr) rs.push_back(InequalityReport::from_json(j));
  return rs;
}

bool csv_equal_ignoring_runtime(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  while (true) {
    bool ga = static_cast<bool>(std::getline(sa, la));
    bool gb = static_cast<bool>(std::getline(sb, lb));
    if (ga != gb) return false;
    if (!ga) return true;
    auto fa = csv_split(la);
    auto fb = csv_split(lb);
    if (fa.size() != fb.size()) return false;
    for (std::size_t i = 0; i < fa.size(); ++i) {
      if (i == 7) continue;  // runtime_ms
      if (fa[i] != fb[i]) return false;
    }
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace soblab
