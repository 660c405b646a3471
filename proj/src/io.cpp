#include "bhgs/io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace bhgs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace

void write_field(const fs::path& path, const Field& u) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  const Grid& g = u.grid();
  const json header = {{"d", g.dim()}, {"n", g.n()}, {"half_width", g.half_width()},
                       {"count", u.size()}};
  out << header.dump() << '\n';
  for (double v : u.values()) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw std::runtime_error(fmt::format("write failed for {}", path.string()));
}

Field read_field(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open field file {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("field file has no header line");
  json h;
  try {
    h = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(fmt::format("field header is not JSON: {}", e.what()));
  }
  for (const char* key : {"d", "n", "half_width", "count"})
    if (!h.contains(key)) throw std::runtime_error(fmt::format("field header lacks \"{}\"", key));
  const Grid g = Grid::make(h["d"].get<int>(), h["n"].get<int>(), h["half_width"].get<double>());
  const auto count = h["count"].get<std::size_t>();
  if (count != g.size())
    throw std::runtime_error(fmt::format("field header count {} does not match grid size {}",
                                         count, g.size()));
  std::vector<double> v(count);
  for (auto& x : v) {
    std::uint64_t bits;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
      throw std::runtime_error("field file is truncated");
    x = std::bit_cast<double>(to_le(bits));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("field file has trailing bytes");
  return Field(g, std::move(v));
}

void write_json(const fs::path& path, const json& j) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  return json::parse(in);
}

std::string format_double(double v) { return fmt::format("{}", v); }

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : rows) out << fmt::format("{}\n", fmt::join(r, ","));
}

void write_iteration_log(const fs::path& path, const std::vector<IterationRecord>& log) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(log.size());
  for (const auto& r : log)
    rows.push_back({std::to_string(r.iter), format_double(r.energy), format_double(r.grad_residual),
                    format_double(r.step_size)});
  write_csv(path, {"iter", "energy", "grad_residual", "step_size"}, rows);
}

}  // namespace bhgs
