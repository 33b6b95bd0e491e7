#include "cflow/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace cflow {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string trace_csv(const Trace& trace) {
  std::string out = "step,time,energy,grad_norm,mean_sq_dist\n";
  for (const TraceRow& r : trace.rows) {
    out += std::to_string(r.step);
    for (double v : {r.time, r.energy, r.grad_norm, r.mean_sq_dist}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string snapshots_csv(const std::vector<Snapshot>& snapshots) {
  const int dim = (snapshots.empty() || snapshots.front().positions.empty()) ? 1 : snapshots.front().positions[0].dim;
  std::string out = dim == 1 ? "time,particle,x0\n" : "time,particle,x0,x1\n";
  for (const Snapshot& s : snapshots) {
    const std::string time = format_double(s.time);
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      out += time;
      out += ',';
      out += std::to_string(i);
      for (int d = 0; d < dim; ++d) {
        out += ',';
        out += format_double(s.positions[i][std::size_t(d)]);
      }
      out += '\n';
    }
  }
  return out;
}

namespace {

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(Errc::Io, "snapshot line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<Snapshot> parse_snapshots_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::Io, "empty snapshot file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int dim = 0;
  if (line == "time,particle,x0") dim = 1;
  else if (line == "time,particle,x0,x1") dim = 2;
  else throw Error(Errc::Io, "unexpected snapshot header '" + line + "'");

  std::vector<Snapshot> out;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      fields.push_back(rest.substr(0, pos));
    }
    fields.push_back(rest);
    if (fields.size() != std::size_t(2 + dim)) {
      throw Error(Errc::Io, "snapshot line " + std::to_string(lineno) + ": expected " + std::to_string(2 + dim) +
                                " fields");
    }
    const double time = parse_number(fields[0], lineno);
    if (out.empty() || out.back().time != time) out.push_back(Snapshot{time, {}});
    Point p = Point::zero(dim);
    for (int d = 0; d < dim; ++d) p[std::size_t(d)] = parse_number(fields[std::size_t(2 + d)], lineno);
    out.back().positions.push_back(p);
  }
  return out;
}

std::vector<Snapshot> read_snapshots_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_snapshots_csv(buf.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace cflow
