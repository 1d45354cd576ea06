#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oddac/errors.h"
#include "oddac/harness.h"

namespace oddac {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ScenarioError("bad number '" + s + "' in log");
  }
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ScenarioError("bad integer '" + s + "' in log");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void write_csv(const RunLog& log, std::ostream& os) {
  os << "# oddac " << log.version << '\n'
     << "# scenario_hash " << log.scenario_hash << '\n'
     << "# seed " << log.seed << '\n'
     << "# rng " << kRngName << '\n'
     << "# backend " << log.backend << '\n'
     << "# run_mode " << log.run_mode << '\n';
  os << 't';
  for (int i = 1; i <= log.n; ++i) os << ",x" << i;
  for (int i = 1; i <= log.m; ++i) os << ",u" << i;
  os << ",norm_x,mode,gain_index,solver_status\n";
  for (const LogRow& r : log.rows) {
    os << r.t;
    for (Eigen::Index i = 0; i < r.x.size(); ++i) os << ',' << format_double(r.x(i));
    for (Eigen::Index i = 0; i < r.u.size(); ++i) os << ',' << format_double(r.u(i));
    os << ',' << format_double(r.norm_x) << ',' << r.mode << ',' << r.gain_index << ','
       << r.solver_status << '\n';
  }
}

void emit_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write '" + path + "'");
  write_csv(log, out);
  if (!out) throw ScenarioError("write to '" + path + "' failed");
}

RunLog parse_csv(std::istream& is) {
  RunLog log;
  std::string line;
  bool have_columns = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream hs(line.substr(1));
      std::string key, value;
      hs >> key >> value;
      if (key == "oddac") log.version = value;
      else if (key == "scenario_hash") log.scenario_hash = value;
      else if (key == "seed") log.seed = static_cast<std::uint64_t>(parse_int(value));
      else if (key == "backend") log.backend = value;
      else if (key == "run_mode") log.run_mode = value;
      continue;
    }
    const auto f = split(line, ',');
    if (!have_columns) {
      for (const auto& name : f) {
        if (name.size() > 1 && name[0] == 'x' && name != "x") ++log.n;
        if (name.size() > 1 && name[0] == 'u') ++log.m;
      }
      if (f.empty() || f.front() != "t" || f.size() != static_cast<std::size_t>(log.n + log.m + 5)) {
        throw ScenarioError("unexpected CSV column header");
      }
      have_columns = true;
      continue;
    }
    if (f.size() != static_cast<std::size_t>(log.n + log.m + 5)) {
      throw ScenarioError("row has " + std::to_string(f.size()) + " fields");
    }
    LogRow r;
    r.t = static_cast<int>(parse_int(f[0]));
    r.x.resize(log.n);
    r.u.resize(log.m);
    for (int i = 0; i < log.n; ++i) r.x(i) = parse_double(f[1 + i]);
    for (int i = 0; i < log.m; ++i) r.u(i) = parse_double(f[1 + log.n + i]);
    const std::size_t k = 1 + log.n + log.m;
    r.norm_x = parse_double(f[k]);
    r.mode = f[k + 1];
    r.gain_index = static_cast<int>(parse_int(f[k + 2]));
    r.solver_status = f[k + 3];
    log.rows.push_back(std::move(r));
  }
  if (!have_columns) throw ScenarioError("log has no column header");
  return log;
}

RunLog read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open log '" + path + "'");
  return parse_csv(in);
}

}  // namespace oddac
