#ifndef SOBLAB_REPORT_IO_HPP
#define SOBLAB_REPORT_IO_HPP

#include <string>
#include <vector>

#include "soblab/lab.hpp"

namespace soblab {

// CSV schema: case,params_json,lhs,rhs,ratio,h,levels,runtime_ms,input_digest.
// Rows are bit-stable for fixed inputs and seed; runtime_ms is informational
// and excluded from golden comparisons.
std::string csv_header();
std::string report_csv_row(const InequalityReport& r);

void write_reports_csv(const std::string& path, const std::vector<InequalityReport>& rs);
void write_reports_json(const std::string& path, const std::vector<InequalityReport>& rs);
std::vector<InequalityReport> read_reports_json(const std::string& path);

// Equality of two CSV payloads with the runtime_ms column masked out.
bool csv_equal_ignoring_runtime(const std::string& a, const std::string& b);

std::string read_text_file(const std::string& path);

}  // namespace soblab

#endif
