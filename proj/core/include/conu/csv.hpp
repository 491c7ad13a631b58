#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "conu/data.hpp"

namespace conu {

/// Malformed input file; `line()` is 1-based (the header is line 1).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Ordinary:      f0,...,f{d-1},y      (y in 1..q)
// Complementary: f0,...,f{d-1},cl     (cl = ';'-separated 1-based indices, may be empty)
// Priors:        k,pi_k,pi_bar_k      (k in 1..q)
// Numbers are written in shortest round-trip form.

void write_ordinary_csv(const OrdinaryDataset& ds, std::ostream& out);
void write_ordinary_csv(const OrdinaryDataset& ds, const std::string& path);
/// `q` <= 0 infers the class count from the largest label.
OrdinaryDataset read_ordinary_csv(std::istream& in, int q = 0);
OrdinaryDataset read_ordinary_csv(const std::string& path, int q = 0);

void write_complementary_csv(const ComplementaryDataset& cds, std::ostream& out);
void write_complementary_csv(const ComplementaryDataset& cds, const std::string& path);
/// `q` <= 0 infers the class count from the largest index present.
ComplementaryDataset read_complementary_csv(std::istream& in, int q = 0);
ComplementaryDataset read_complementary_csv(const std::string& path, int q = 0);

void write_priors_csv(const ClassPriors& priors, std::ostream& out);
void write_priors_csv(const ClassPriors& priors, const std::string& path);
ClassPriors read_priors_csv(std::istream& in);
ClassPriors read_priors_csv(const std::string& path);

std::string format_double(double v);

}  // namespace conu
