#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "stackfit/lp.hpp"

namespace stackfit::lp {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes " + 2 x1 - 3 x4 ..." wrapping every 8 terms; all-zero rows emit "0 x1".
void write_terms(std::ostream& out, const std::vector<double>& coeffs) {
  std::size_t written = 0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double c = coeffs[j];
    if (c == 0.0) continue;
    if (written > 0 && written % 8 == 0) out << "\n  ";
    out << (c < 0.0 ? " - " : " + ") << num(std::abs(c)) << " x" << (j + 1);
    ++written;
  }
  if (written == 0) out << " 0 x1";
}

}  // namespace

void write_cplex_lp(const LinearProgram& lp, std::ostream& out) {
  out << "\\ " << lp.num_vars << " variables, " << lp.constraints.size() << " constraints\n";
  out << "Minimize\n obj:";
  write_terms(out, lp.objective);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& row = lp.constraints[i];
    out << " c" << (i + 1) << ":";
    write_terms(out, row.coeffs);
    out << (row.relation == Relation::LE ? " <= " : " = ") << num(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const auto [lo, hi] = lp.bounds[j];
    const std::string name = "x" + std::to_string(j + 1);
    const bool lo_inf = !std::isfinite(lo);
    const bool hi_inf = !std::isfinite(hi);
    if (lo_inf && hi_inf) {
      out << " " << name << " free\n";
    } else if (lo_inf) {
      out << " -inf <= " << name << " <= " << num(hi) << "\n";
    } else if (hi_inf) {
      if (lo != 0.0) out << " " << name << " >= " << num(lo) << "\n";
    } else {
      out << " " << num(lo) << " <= " << name << " <= " << num(hi) << "\n";
    }
  }
  out << "End\n";
}

std::string to_cplex_lp(const LinearProgram& lp) {
  std::ostringstream os;
  write_cplex_lp(lp, os);
  return os.str();
}

}  // namespace stackfit::lp
