#include "hpmg/history.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hpmg {

namespace {

const char* kBaseHeader = "L,k,ndof,nelem,eta,zeta,cum_cost,wall_ms";
const char* kValidationHeader = "L,k,ndof,nelem,eta,zeta,cum_cost,wall_ms,alg_err,contraction";

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse(const std::string& cell, int line) {
  std::istringstream is(cell);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) throw std::runtime_error("history line " + std::to_string(line) + ": bad value '" + cell + "'");
  return v;
}

}  // namespace

void write_history_csv(std::ostream& os, const AfemHistory& history, bool with_validation) {
  os << (with_validation ? kValidationHeader : kBaseHeader) << '\n';
  for (const auto& r : history.records) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_ms);
    os << r.L << ',' << r.k << ',' << r.ndof << ',' << r.nelem << ',' << real(r.eta) << ','
       << real(r.zeta) << ',' << r.cum_cost << ',' << wall;
    if (with_validation)
      os << ',' << real(r.alg_err.value_or(0.0)) << ',' << real(r.contraction.value_or(0.0));
    os << '\n';
  }
}

AfemHistory read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("history: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool validation = false;
  if (line == kValidationHeader) validation = true;
  else if (line != kBaseHeader) throw std::runtime_error("history: unexpected header '" + line + "'");

  AfemHistory h;
  int n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != (validation ? 10u : 8u))
      throw std::runtime_error("history line " + std::to_string(n) + ": wrong number of columns");
    AfemRecord r;
    r.L = parse<int>(cells[0], n);
    r.k = parse<int>(cells[1], n);
    r.ndof = parse<long>(cells[2], n);
    r.nelem = parse<long>(cells[3], n);
    r.eta = parse<double>(cells[4], n);
    r.zeta = parse<double>(cells[5], n);
    r.cum_cost = parse<long>(cells[6], n);
    r.wall_ms = parse<double>(cells[7], n);
    if (validation) {
      r.alg_err = parse<double>(cells[8], n);
      r.contraction = parse<double>(cells[9], n);
    }
    h.records.push_back(r);
  }
  return h;
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set logscale xy\n"
     << "set key bottom left\n"
     << "set title '" << title << "'\n"
     << "set terminal pngcairo size 1200,500\n"
     << "set output 'plot.png'\n"
     << "set multiplot layout 1,2\n"
     << "set xlabel 'ndof'\n"
     << "plot '" << csv_name << "' every ::1 using 3:5 with linespoints title 'eta', \\\n"
     << "     '' every ::1 using 3:6 with points title 'zeta'\n"
     << "set xlabel 'cumulative cost'\n"
     << "plot '" << csv_name << "' every ::1 using 7:5 with linespoints title 'eta'\n"
     << "unset multiplot\n";
  return os.str();
}

}  // namespace hpmg
