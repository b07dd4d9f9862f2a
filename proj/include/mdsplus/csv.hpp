#pragma once

#include "mdsplus/matrix.hpp"

#include <iosfwd>
#include <string>

namespace mdsplus::csv {

/// Parses comma-separated rows. An optional first line starting with '#' is a
/// header and is skipped; blank lines are ignored. Throws ParseError on ragged
/// rows, non-numeric fields or an empty document.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

/// One row per line, shortest round-trip decimal form (always >= 12
/// significant digits of precision), locale independent.
void write_matrix(std::ostream& out, const Matrix& m, const std::string& header = {});
void write_matrix_file(const std::string& path, const Matrix& m, const std::string& header = {});

/// Locale-independent shortest round-trip formatting of a double.
std::string format_double(double value);

}  // namespace mdsplus::csv
