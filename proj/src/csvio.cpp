#include <cstdio>
#include <fstream>
#include <sstream>

#include "harvester/csvio.hpp"

namespace harvester {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string file_header(const BeamParameters& p) {
  std::ostringstream os;
  os << "# harvester " << kVersion << "\n";
  os << "# m=" << format_double(p.m) << " J=" << format_double(p.J)
     << " S=" << format_double(p.S) << " E=" << format_double(p.E)
     << " G=" << format_double(p.G) << " L=" << format_double(p.L) << "\n";
  os << "# k1=" << format_double(p.k1) << " k2=" << format_double(p.k2)
     << " Cp=" << format_double(p.Cp) << " R=" << format_double(p.R)
     << " CD=" << format_double(p.CD) << " CI=" << format_double(p.CI) << "\n";
  return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::BadArgument, "cannot open for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) fail(Err::BadArgument, "write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail(Err::BadArgument, "cannot rename into place: " + path);
}

std::string csv_table(const std::string& header_comment,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  os << header_comment;
  for (std::size_t i = 0; i < columns.size(); ++i)
    os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace harvester
