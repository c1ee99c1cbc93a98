#include "sbt/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace sbt::io {

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ParamError("cannot open '" + tmp.string() + "' for writing");
    os << content;
    os.flush();
    if (!os) {
      os.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ParamError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw ParamError("cannot move output into place at '" + path.string() + "'");
  }
}

FrequencyGrid read_grid_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParamError("cannot read grid file '" + path.string() + "'");
  std::vector<double> hz;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0.0;
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
      throw ParamError("grid file '" + path.string() + "' line " + std::to_string(lineno) + " is not a number");
    hz.push_back(v);
  }
  return FrequencyGrid::explicit_points(std::move(hz));
}

std::string grid_to_text(const FrequencyGrid& grid) {
  std::string out;
  for (double f : grid.hz()) {
    out += format_double(f);
    out += '\n';
  }
  return out;
}

std::string trace_to_csv(const SimTrace& trace) {
  std::string out = "t,i_grid,v_grid,v_inv\n";
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    out += format_double(trace.t[k]);
    out += ',';
    out += format_double(trace.i_grid[k]);
    out += ',';
    out += format_double(trace.v_grid[k]);
    out += ',';
    out += format_double(trace.v_inv[k]);
    out += '\n';
  }
  return out;
}

}  // namespace sbt::io
