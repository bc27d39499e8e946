#include "kgm/report.hpp"

#include "kgm/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace kgm {

namespace {

void emit(const Json &v, std::string &out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
  case Json::value_t::object: {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto &[key, item] : v.items()) {
      if (!first)
        out += ",\n";
      first = false;
      out += pad + Json(key).dump() + ": ";
      emit(item, out, indent + 2);
    }
    out += "\n" + close + "}";
    return;
  }
  case Json::value_t::array: {
    if (v.empty()) {
      out += "[]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i)
        out += ",\n";
      out += pad;
      emit(v[i], out, indent + 2);
    }
    out += "\n" + close + "]";
    return;
  }
  case Json::value_t::number_float: {
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      out += "null";
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
    return;
  }
  default:
    out += v.dump();
  }
}

} // namespace

std::string dump_json(const Json &value) {
  std::string out;
  emit(value, out, 0);
  out += "\n";
  return out;
}

std::string format_shortest(double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string make_csv(const std::vector<std::string> &header,
                     const std::vector<std::vector<double>> &columns) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out += (c ? "," : "") + header[c];
  out += "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c)
        out += ",";
      out += format_shortest(columns[c][r]);
    }
    out += "\n";
  }
  return out;
}

void write_file(const std::string &path, const std::string &text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text))
    throw Error("cannot write '" + path + "'");
}

} // namespace kgm
