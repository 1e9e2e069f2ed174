#include "selfish/trajectory.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace selfish {

namespace {

constexpr char kColumns[] = "frame,kind,id,x,y,orientation_deg,caught_flag";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TrajectoryWriter::TrajectoryWriter(std::ostream& out, const TrajectoryHeader& header)
    : out_(out) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, header.config_hash);
  out_ << "# edge_length=" << fmt_double(header.edge_length) << "\n"
       << "# seed=" << header.seed << "\n"
       << "# config_hash=" << hash << "\n"
       << "# policy=" << header.policy << "\n"
       << kColumns << "\n";
}

void TrajectoryWriter::write_frame(const WorldState& state, const StepEvents* events) {
  for (const AgentState& a : state.agents) {
    const CatchEvent* caught = nullptr;
    if (events)
      for (const CatchEvent& c : events->catches)
        if (c.id == a.id) caught = &c;
    const Vec2 pos = caught ? caught->death_pos : a.pos;
    const double orient = caught ? caught->death_orientation_deg : a.orientation_deg;
    out_ << state.frame << ",prey," << a.id << ',' << fmt_double(pos.x) << ','
         << fmt_double(pos.y) << ',' << fmt_double(orient) << ','
         << (caught ? 1 : 0) << "\n";
  }
  out_ << state.frame << ",predator,0," << fmt_double(state.predator.pos.x) << ','
       << fmt_double(state.predator.pos.y) << ','
       << fmt_double(state.predator.orientation_deg) << ",0\n";
}

namespace {

[[noreturn]] void fail(const std::string& path, long line, const std::string& why) {
  throw std::runtime_error("trajectory " + path + " line " + std::to_string(line) +
                           ": " + why);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, const std::string& path, long line) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(path, line, "not a number: " + s);
  }
  if (pos != s.size()) fail(path, line, "trailing junk in number: " + s);
  return v;
}

long parse_long(const std::string& s, const std::string& path, long line) {
  size_t pos = 0;
  long v;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    fail(path, line, "not an integer: " + s);
  }
  if (pos != s.size()) fail(path, line, "trailing junk in integer: " + s);
  return v;
}

}  // namespace

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path);

  Trajectory t;
  std::string line;
  long lineno = 0;
  bool saw_edge = false, saw_columns = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(1);
      const size_t eq = body.find('=');
      if (eq == std::string::npos) continue;  // free-form comment
      size_t ks = body.find_first_not_of(' ');
      const std::string key = body.substr(ks, eq - ks);
      const std::string value = body.substr(eq + 1);
      if (key == "edge_length") {
        t.header.edge_length = parse_double(value, path, lineno);
        saw_edge = true;
      } else if (key == "seed") {
        t.header.seed = std::strtoull(value.c_str(), nullptr, 10);
      } else if (key == "config_hash") {
        t.header.config_hash = std::strtoull(value.c_str(), nullptr, 16);
      } else if (key == "policy") {
        t.header.policy = value;
      }
      continue;
    }
    if (!saw_columns) {
      if (line != kColumns)
        fail(path, lineno, "expected header row '" + std::string(kColumns) + "'");
      saw_columns = true;
      continue;
    }
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != 7) fail(path, lineno, "expected 7 fields, got " +
                                              std::to_string(f.size()));
    TrajectoryRow row;
    row.frame = parse_long(f[0], path, lineno);
    if (f[1] == "prey")
      row.predator = false;
    else if (f[1] == "predator")
      row.predator = true;
    else
      fail(path, lineno, "kind must be prey or predator: " + f[1]);
    row.id = static_cast<int>(parse_long(f[2], path, lineno));
    row.x = parse_double(f[3], path, lineno);
    row.y = parse_double(f[4], path, lineno);
    row.orientation_deg = parse_double(f[5], path, lineno);
    const long caught = parse_long(f[6], path, lineno);
    if (caught != 0 && caught != 1) fail(path, lineno, "caught_flag must be 0 or 1");
    if (row.predator && caught != 0) fail(path, lineno, "predator cannot be caught");
    if (row.frame < 0 || row.id < 0) fail(path, lineno, "negative frame or id");
    row.caught = caught == 1;
    t.rows.push_back(row);
  }
  if (!saw_columns) throw std::runtime_error("trajectory " + path + ": no header row");
  if (!saw_edge) throw std::runtime_error("trajectory " + path + ": missing # edge_length");

  // Build the dense views; empty trajectories (header only) stay empty.
  if (t.rows.empty()) return t;
  long max_frame = 0;
  int max_id = 0;
  for (const TrajectoryRow& r : t.rows) {
    max_frame = std::max(max_frame, r.frame);
    if (!r.predator) max_id = std::max(max_id, r.id);
  }
  t.num_frames = max_frame + 1;
  t.num_agents = max_id + 1;
  t.prey_pos.assign(t.num_frames, std::vector<Vec2>(t.num_agents));
  t.prey_orient.assign(t.num_frames, std::vector<double>(t.num_agents, 0.0));
  t.predator_pos.assign(t.num_frames, Vec2{});
  std::vector<std::vector<bool>> seen(t.num_frames,
                                      std::vector<bool>(t.num_agents, false));
  std::vector<bool> seen_pred(t.num_frames, false);
  for (const TrajectoryRow& r : t.rows) {
    if (r.predator) {
      if (seen_pred[r.frame])
        throw std::runtime_error("trajectory " + path + ": duplicate predator row in frame " +
                                 std::to_string(r.frame));
      seen_pred[r.frame] = true;
      t.predator_pos[r.frame] = {r.x, r.y};
      continue;
    }
    if (seen[r.frame][r.id])
      throw std::runtime_error("trajectory " + path + ": duplicate prey row (frame " +
                               std::to_string(r.frame) + ", id " +
                               std::to_string(r.id) + ")");
    seen[r.frame][r.id] = true;
    t.prey_pos[r.frame][r.id] = {r.x, r.y};
    t.prey_orient[r.frame][r.id] = r.orientation_deg;
    if (r.caught) t.catches.emplace_back(r.frame, r.id);
  }
  for (long fidx = 0; fidx < t.num_frames; ++fidx) {
    if (!seen_pred[fidx])
      throw std::runtime_error("trajectory " + path + ": missing predator row in frame " +
                               std::to_string(fidx));
    for (int a = 0; a < t.num_agents; ++a)
      if (!seen[fidx][a])
        throw std::runtime_error("trajectory " + path + ": missing prey row (frame " +
                                 std::to_string(fidx) + ", id " + std::to_string(a) +
                                 ")");
  }
  std::sort(t.catches.begin(), t.catches.end());
  return t;
}

}  // namespace selfish
