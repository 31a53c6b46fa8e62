#include "bogolib/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bogolib {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw Error("truncated binary file");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return is;
}

}  // namespace

void write_field(const std::filesystem::path& path, const Grid& grid, const Vector& u) {
  grid.check_length(u.size(), "write_field");
  auto os = open_out(path);
  put<double>(os, grid.box_length());
  put<std::int64_t>(os, grid.size());
  os.write(reinterpret_cast<const char*>(u.data()), sizeof(double) * u.size());
}

FieldFile read_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  FieldFile f;
  f.box_length = get<double>(is);
  f.n_points = get<std::int64_t>(is);
  if (f.n_points <= 0) throw Error("bad field header in " + path.string());
  f.values.resize(f.n_points);
  is.read(reinterpret_cast<char*>(f.values.data()), sizeof(double) * f.n_points);
  if (!is) throw Error("truncated field payload in " + path.string());
  return f;
}

void write_dense(const std::filesystem::path& path, const Matrix& a, const std::string& label,
                 const std::string& model_hash) {
  nlohmann::json h;
  h["rows"] = a.rows();
  h["cols"] = a.cols();
  h["labels"] = label;
  h["model_hash"] = model_hash;
  std::string head = h.dump();
  auto os = open_out(path);
  put<std::uint64_t>(os, head.size());
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = a;
  os.write(reinterpret_cast<const char*>(rm.data()), sizeof(double) * rm.size());
}

Matrix read_dense(const std::filesystem::path& path) {
  auto is = open_in(path);
  auto len = get<std::uint64_t>(is);
  std::string head(len, '\0');
  is.read(head.data(), static_cast<std::streamsize>(len));
  auto h = nlohmann::json::parse(head);
  Index r = h.at("rows").get<Index>(), c = h.at("cols").get<Index>();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(r, c);
  is.read(reinterpret_cast<char*>(rm.data()), sizeof(double) * rm.size());
  if (!is) throw Error("truncated matrix payload in " + path.string());
  return rm;
}

void write_coo(const std::filesystem::path& path, std::int64_t dim, const std::vector<Triplet>& t) {
  auto os = open_out(path);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(dim));
  put<std::uint64_t>(os, t.size());
  for (const auto& e : t) {
    put<std::int64_t>(os, e.row);
    put<std::int64_t>(os, e.col);
    put<double>(os, e.value);
  }
}

std::vector<Triplet> read_coo(const std::filesystem::path& path, std::int64_t* dim) {
  auto is = open_in(path);
  auto d = get<std::uint64_t>(is);
  auto count = get<std::uint64_t>(is);
  if (dim) *dim = static_cast<std::int64_t>(d);
  std::vector<Triplet> t(count);
  for (auto& e : t) {
    e.row = get<std::int64_t>(is);
    e.col = get<std::int64_t>(is);
    e.value = get<double>(is);
  }
  return t;
}

namespace {

void dump_rec(const nlohmann::ordered_json& j, int indent, int depth, std::string& out) {
  auto pad = [&](int d) {
    if (indent > 0) out += "\n" + std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",";
      first = false;
      pad(depth + 1);
      out += nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
      dump_rec(it.value(), indent, depth + 1, out);
    }
    pad(depth);
    out += "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += "[";
    bool first = true;
    for (const auto& e : j) {
      if (!first) out += ",";
      first = false;
      pad(depth + 1);
      dump_rec(e, indent, depth + 1, out);
    }
    pad(depth);
    out += "]";
  } else if (j.is_number_float()) {
    double x = j.get<double>();
    out += std::isfinite(x) ? format_double(x) : "null";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
}

std::string read_text(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace bogolib
