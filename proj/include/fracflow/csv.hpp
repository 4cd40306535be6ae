#ifndef FRACFLOW_CSV_HPP
#define FRACFLOW_CSV_HPP

#include <string>
#include <vector>

#include "fracflow/solution.hpp"

namespace fracflow {

// Locale-independent CSV ('.' decimal, header row always present, %.12g
// values) so identical runs produce byte-identical files.
std::string solution_curve_csv(const SolutionCurve& curve,
                               bool include_method_column);

// Generic small table: header names plus rows of doubles.
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

void write_file(const std::string& path, const std::string& contents);

}  // namespace fracflow

#endif  // FRACFLOW_CSV_HPP
