#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcgf/samplers.hpp"

namespace lcgf {

// Binary field dump: magic "LCGF1\n", ASCII header "d N model seed\n", then
// N^d little-endian IEEE doubles in row-major order.
void write_field_dump(const std::string& path, const FieldSample& f);
FieldSample read_field_dump(const std::string& path);

// RFC-4180 CSV: fields quoted only when needed, CRLF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  void row(const std::vector<std::string>& fields);

 private:
  struct Impl;
  Impl* impl_;
};

std::string csv_escape(const std::string& field);
std::string format_double(double x);

// Flat key = value config files; '#' starts a comment; grids are comma lists.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;                       // throws when missing
  std::string get_or(const std::string& key, const std::string& dflt) const;
  std::int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  // Canonical text (sorted key = value lines) used for the digest.
  std::string canonical() const;
  std::string digest() const;  // FNV-1a 64 over the canonical text, hex

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

 private:
  std::map<std::string, std::string> entries_;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

std::string fnv1a_hex(const std::string& data);

}  // namespace lcgf
