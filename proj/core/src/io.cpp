#include "hyperwind/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "hyperwind/error.hpp"

namespace hyperwind {

namespace fs = std::filesystem;

namespace {

const char* const kFiles[] = {"paths.csv", "checkpoints.csv", "stopping.csv", "rays.csv", "exits.csv"};

std::string columns(const std::string& prefix, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += "," + prefix + std::to_string(i + 1);
  return out;
}

class CsvReader {
 public:
  explicit CsvReader(const fs::path& path) : name_(path.filename().string()) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(name_, "missing header");
    header_ = split(line);
    while (std::getline(in, line))
      if (!line.empty()) rows_.push_back(split(line));
  }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t width() const { return header_.size(); }

  template <class T>
  T get(const std::vector<std::string>& row, std::size_t col) const {
    if (col >= row.size()) throw SchemaError(name_, "short row");
    T v{};
    const auto& s = row[col];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw SchemaError(name_, "bad field \"" + s + "\"");
    return v;
  }

 private:
  static std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  }
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string text_digest(std::string_view text) { return hex_digest(fnv1a64(text)); }

std::string file_digest(const fs::path& path) { return text_digest(read_text_file(path)); }

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericalInstability("cannot format double");
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageOrderError("missing file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DatasetFiles write_dataset(const Dataset& data, const fs::path& dir) {
  fs::create_directories(dir);
  const std::size_t d = data.paths.empty() ? 0 : data.paths.front().dim;
  const std::size_t r = data.paths.empty() ? 0 : data.paths.front().refs;
  std::string paths = "path,seed,horizon,dim,refs,steps_simulated,max_tracking,limit_angle,partial\n";
  std::string checkpoints = "path,step,t" + columns("w", d) + columns("h", r) + "\n";
  std::string stopping = "path,threshold,tau,t,tracking" + columns("w", d) + "\n";
  std::string rays = "path,time" + columns("w", d) + "\n";
  std::string exits = "path,kind,index,side,time\n";
  for (const auto& p : data.paths) {
    const std::string id = std::to_string(p.index);
    paths += id + "," + std::to_string(p.seed) + "," + std::to_string(p.horizon) + "," + std::to_string(p.dim) + "," +
             std::to_string(p.refs) + "," + std::to_string(p.steps_simulated) + "," +
             std::to_string(p.max_tracking) + "," + format_double(p.limit_angle) + "," + (p.partial ? "1" : "0") +
             "\n";
    for (std::size_t c = 0; c < p.steps.size(); ++c) {
      checkpoints += id + "," + std::to_string(p.steps[c]) + "," + format_double(p.t[c]);
      for (auto w : p.winding_at(c)) checkpoints += "," + std::to_string(w);
      for (auto h : p.busemann_at(c)) checkpoints += "," + format_double(h);
      checkpoints += "\n";
    }
    for (const auto& s : p.stopping) {
      stopping += id + "," + format_double(s.threshold) + "," + std::to_string(s.tau) + "," + format_double(s.t) + "," +
                  std::to_string(s.tracking);
      for (std::size_t j = 0; j < d; ++j) stopping += "," + std::to_string(s.winding.empty() ? 0 : s.winding[j]);
      stopping += "\n";
    }
    for (std::size_t i = 0; i < p.ray_times.size(); ++i) {
      rays += id + "," + format_double(p.ray_times[i]);
      for (auto w : p.ray_winding_at(i)) rays += "," + std::to_string(w);
      rays += "\n";
    }
    auto exit_rows = [&](const std::vector<ExitResult>& xs, const char* kind) {
      for (std::size_t i = 0; i < xs.size(); ++i)
        exits += id + "," + kind + "," + std::to_string(i) + "," + std::to_string(xs[i].side) + "," +
                 std::to_string(xs[i].time) + "\n";
    };
    exit_rows(p.ray_exits, "ray");
    exit_rows(p.martingale_exits, "martingale");
  }
  write_text(dir / "paths.csv", paths);
  write_text(dir / "checkpoints.csv", checkpoints);
  write_text(dir / "stopping.csv", stopping);
  write_text(dir / "rays.csv", rays);
  write_text(dir / "exits.csv", exits);
  return digest_dataset(dir);
}

DatasetFiles digest_dataset(const fs::path& dir) {
  DatasetFiles files;
  std::string all;
  for (const char* name : kFiles) {
    const auto digest = file_digest(dir / name);
    files.digests[name] = digest;
    all += std::string(name) + "=" + digest + "\n";
  }
  files.combined = text_digest(all);
  return files;
}

Dataset read_dataset(const fs::path& dir, std::uint64_t master_seed) {
  Dataset data;
  data.master_seed = master_seed;
  const CsvReader paths(dir / "paths.csv");
  std::vector<std::size_t> slot;
  for (const auto& row : paths.rows()) {
    PathRecord p;
    p.index = paths.get<std::size_t>(row, 0);
    p.seed = paths.get<std::uint64_t>(row, 1);
    p.horizon = paths.get<std::size_t>(row, 2);
    p.dim = paths.get<std::size_t>(row, 3);
    p.refs = paths.get<std::size_t>(row, 4);
    p.steps_simulated = paths.get<std::uint64_t>(row, 5);
    p.max_tracking = paths.get<std::int64_t>(row, 6);
    p.limit_angle = paths.get<double>(row, 7);
    p.partial = paths.get<int>(row, 8) != 0;
    if (p.index != data.paths.size()) throw SchemaError("paths.csv", "paths out of order");
    data.paths.push_back(std::move(p));
  }
  auto path_of = [&](const CsvReader& csv, const std::vector<std::string>& row) -> PathRecord& {
    const auto i = csv.get<std::size_t>(row, 0);
    if (i >= data.paths.size()) throw SchemaError("dataset", "row refers to unknown path");
    return data.paths[i];
  };

  const CsvReader checkpoints(dir / "checkpoints.csv");
  for (const auto& row : checkpoints.rows()) {
    auto& p = path_of(checkpoints, row);
    if (row.size() != 3 + p.dim + p.refs) throw SchemaError("checkpoints.csv", "row width");
    p.steps.push_back(checkpoints.get<std::uint64_t>(row, 1));
    p.t.push_back(checkpoints.get<double>(row, 2));
    for (std::size_t j = 0; j < p.dim; ++j) p.winding.push_back(checkpoints.get<std::int64_t>(row, 3 + j));
    for (std::size_t j = 0; j < p.refs; ++j) p.busemann.push_back(checkpoints.get<double>(row, 3 + p.dim + j));
  }
  const CsvReader stopping(dir / "stopping.csv");
  for (const auto& row : stopping.rows()) {
    auto& p = path_of(stopping, row);
    if (row.size() != 5 + p.dim) throw SchemaError("stopping.csv", "row width");
    StoppingHit h;
    h.threshold = stopping.get<double>(row, 1);
    h.tau = stopping.get<std::int64_t>(row, 2);
    h.t = stopping.get<double>(row, 3);
    h.tracking = stopping.get<std::int64_t>(row, 4);
    if (h.tau != kCensored)
      for (std::size_t j = 0; j < p.dim; ++j) h.winding.push_back(stopping.get<std::int64_t>(row, 5 + j));
    p.stopping.push_back(std::move(h));
  }
  const CsvReader rays(dir / "rays.csv");
  for (const auto& row : rays.rows()) {
    auto& p = path_of(rays, row);
    if (row.size() != 2 + p.dim) throw SchemaError("rays.csv", "row width");
    p.ray_times.push_back(rays.get<double>(row, 1));
    for (std::size_t j = 0; j < p.dim; ++j) p.ray_winding.push_back(rays.get<std::int64_t>(row, 2 + j));
  }
  const CsvReader exits(dir / "exits.csv");
  for (const auto& row : exits.rows()) {
    auto& p = path_of(exits, row);
    if (row.size() != 5) throw SchemaError("exits.csv", "row width");
    const ExitResult e{exits.get<int>(row, 3), exits.get<std::int64_t>(row, 4)};
    if (row[1] == "ray")
      p.ray_exits.push_back(e);
    else if (row[1] == "martingale")
      p.martingale_exits.push_back(e);
    else
      throw SchemaError("exits.csv", "unknown exit kind \"" + row[1] + "\"");
  }
  accumulate(data);
  return data;
}

}  // namespace hyperwind
