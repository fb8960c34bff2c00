#include "lcgf/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lcgf {

namespace {
constexpr char kMagic[] = "LCGF1\n";

bool is_little_endian() {
  const std::uint16_t x = 1;
  return *reinterpret_cast<const std::uint8_t*>(&x) == 1;
}

void to_little_endian(std::vector<double>& v) {
  if (is_little_endian()) return;
  for (double& x : v) {
    auto* b = reinterpret_cast<std::uint8_t*>(&x);
    for (int i = 0; i < 4; ++i) std::swap(b[i], b[7 - i]);
  }
}
}  // namespace

void write_field_dump(const std::string& path, const FieldSample& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field_dump: cannot open " + path);
  os.write(kMagic, 6);
  std::ostringstream header;
  header << f.lattice.dim() << " " << f.lattice.side() << " " << f.model << " " << f.seed << "\n";
  const std::string h = header.str();
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<double> vals = f.values;
  to_little_endian(vals);
  os.write(reinterpret_cast<const char*>(vals.data()),
           static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_field_dump: write failed for " + path);
}

FieldSample read_field_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field_dump: cannot open " + path);
  char magic[6];
  is.read(magic, 6);
  if (!is || std::memcmp(magic, kMagic, 6) != 0)
    throw std::runtime_error("read_field_dump: bad magic in " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  int d = 0;
  std::int64_t N = 0;
  std::string model;
  std::uint64_t seed = 0;
  if (!(hs >> d >> N >> model >> seed))
    throw std::runtime_error("read_field_dump: bad header in " + path);
  Lattice lat(N, d);
  std::vector<double> vals(lat.volume());
  is.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_field_dump: truncated data in " + path);
  to_little_endian(vals);
  return FieldSample{lat, std::move(vals), model, seed, 0};
}

struct CsvWriter::Impl {
  std::ofstream os;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->os.open(path, std::ios::binary);
  if (!impl_->os) {
    delete impl_;
    throw std::runtime_error("CsvWriter: cannot open " + path);
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) impl_->os << ",";
    impl_->os << csv_escape(fields[i]);
  }
  impl_->os << "\r\n";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str());
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key + ": required");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& dflt) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? dflt : it->second;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: " + v);
  }
}

double Config::get_double(const std::string& key) const {
  const std::string v = get(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: " + v);
  }
}

namespace {
std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}
}  // namespace

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& s : split_commas(get(key))) {
    try {
      out.push_back(std::stoll(s));
    } catch (const std::exception&) {
      throw ConfigError(key + ": not an integer list element: " + s);
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_commas(get(key))) {
    try {
      out.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw ConfigError(key + ": not a number list element: " + s);
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  return os.str();
}

std::string Config::digest() const { return fnv1a_hex(canonical()); }

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace lcgf
