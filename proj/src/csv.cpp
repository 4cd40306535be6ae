#include "fracflow/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fracflow {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string solution_curve_csv(const SolutionCurve& curve,
                               bool include_method_column) {
  std::string out = curve.two_dim ? "t,t2,value,std_error,n_paths,"
                                    "truncated_fraction"
                                  : "t,value,std_error,n_paths,"
                                    "truncated_fraction";
  if (include_method_column) out += ",method";
  out += "\n";
  for (const auto& pt : curve.points) {
    out += fmt(pt.t1);
    if (curve.two_dim) out += "," + fmt(pt.t2);
    out += "," + fmt(pt.value) + "," + fmt(pt.std_error) + "," +
           std::to_string(pt.n_paths) + "," + fmt(pt.truncated_fraction);
    if (include_method_column) out += "," + curve.method;
    out += "\n";
  }
  return out;
}

std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += fmt(row[i]);
    }
    out += "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good())
    throw std::runtime_error("cannot open output file: " + path);
  out << contents;
  if (!out.good()) throw std::runtime_error("failed writing: " + path);
}

}  // namespace fracflow
