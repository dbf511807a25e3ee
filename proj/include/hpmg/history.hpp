#pragma once

#include <iosfwd>
#include <string>

#include "hpmg/adaptivity.hpp"

namespace hpmg {

/// "L,k,ndof,nelem,eta,zeta,cum_cost,wall_ms" plus ",alg_err,contraction"
/// when `with_validation`. Reals are written with 17 significant digits.
void write_history_csv(std::ostream& os, const AfemHistory& history, bool with_validation);

/// Parses the format above (either column set). Metadata fields of the
/// result are left at their defaults. Throws std::runtime_error on a
/// malformed header or row.
AfemHistory read_history_csv(std::istream& is);

/// gnuplot script plotting eta and zeta against ndof and cumulative cost
/// from `csv_name` (log-log).
std::string gnuplot_script(const std::string& csv_name, const std::string& title);

}  // namespace hpmg
