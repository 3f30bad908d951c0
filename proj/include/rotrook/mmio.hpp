#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rotrook/symcore.hpp"

namespace rotrook {

/// Malformed input file; carries the 1-based line the problem was found on.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Matrix Market "coordinate real symmetric" files. Entries may be given in
// either triangle; they are stored once. Indices in the file are 1-based.
PackedSymMatrix read_matrix_market(std::istream& in);
void write_matrix_market(std::ostream& out, const PackedSymMatrix& a);

// Dense vectors: either a Matrix Market "array real general" n x 1 file or a
// bare whitespace-separated list of numbers (comment lines start with '%').
DenseVector read_vector(std::istream& in);
void write_vector(std::ostream& out, const DenseVector& v);

PackedSymMatrix read_matrix_market_file(const std::string& path);
DenseVector read_vector_file(const std::string& path);

}  // namespace rotrook
