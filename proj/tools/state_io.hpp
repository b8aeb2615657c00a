#pragma once

#include <string>
#include <string_view>

#include "qdecon/state.hpp"

namespace qdecon::cli {

/// Syntax or validation failure in a state file. Line and column are 1-based;
/// column 0 means the whole line.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

/// Parses the QSTATE 1 text format:
///
///   QSTATE 1
///   labels A B
///   dims 2 2
///   <D rows of D entries "re,im">
///
/// Blank lines and everything after '#' are ignored. The state is validated
/// with `tol` but its entries are kept verbatim.
MultipartiteState parse_state(std::string_view text, const Tolerances& tol = {});

/// Entries are printed with %.17g, so parse_state(write_state(s)) reproduces
/// the matrix bit for bit.
std::string write_state(const MultipartiteState& s);

MultipartiteState read_state_file(const std::string& path, const Tolerances& tol = {});
void write_state_file(const std::string& path, const MultipartiteState& s);

/// 64-bit FNV-1a digest of a byte string, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace qdecon::cli
