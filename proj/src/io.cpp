#include "sgnav/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "sgnav/errors.hpp"
#include "sgnav/rng.hpp"
#include "sgnav/version.hpp"

namespace sgnav {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  return out;
}

// Splits on '\n', tolerating a trailing '\r' per line and a missing final
// newline.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

bool blank_or_comment(const std::string& line) {
  const std::size_t i = line.find_first_not_of(" \t");
  return i == std::string::npos || line[i] == '#';
}

double parse_double_field(const std::string& field, int line_no, const char* what) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  double value = 0.0;
  auto [p, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || p != end)
    throw ParseError(std::string("malformed ") + what + " '" + field + "'", line_no);
  return value;
}

FrameId to_frame(double v, int line_no) {
  const auto f = static_cast<FrameId>(std::llround(v));
  if (std::abs(v - static_cast<double>(f)) > 1e-9)
    throw ParseError("frame id is not an integer", line_no);
  return f;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// Accumulates raw rows, then sorts and checks for duplicates. Line numbers
// ride along for error reports.
class SceneBuilder {
 public:
  void add(FrameId frame, PedestrianId id, Vec2 pos, int line_no) {
    if (!std::isfinite(pos.x) || !std::isfinite(pos.y))
      throw ParseError("non-finite coordinate", line_no);
    auto& track = rows_[id];
    if (!track.empty() && frame <= track.back().frame) out_of_order_ = true;
    track.push_back({frame, pos, line_no});
  }

  LoadReport finish() && {
    LoadReport report;
    if (out_of_order_)
      report.warnings.push_back("input frames were not in order; tracks re-sorted");
    std::set<FrameId> frames;
    for (auto& [id, rows] : rows_) {
      std::stable_sort(rows.begin(), rows.end(),
                       [](const Row& a, const Row& b) { return a.frame < b.frame; });
      Track track;
      track.ped_id = id;
      for (const Row& r : rows) {
        if (!track.samples.empty() && track.samples.back().frame == r.frame)
          throw ParseError("duplicate sample for pedestrian " + std::to_string(id) +
                               " at frame " + std::to_string(r.frame),
                           r.line_no);
        track.samples.push_back({r.frame, r.pos});
        frames.insert(r.frame);
      }
      report.scene.tracks.emplace(id, std::move(track));
    }
    report.scene.frames.assign(frames.begin(), frames.end());
    report.scene.validate();
    return report;
  }

 private:
  struct Row {
    FrameId frame;
    Vec2 pos;
    int line_no;
  };
  std::map<PedestrianId, std::vector<Row>> rows_;
  bool out_of_order_ = false;
};

json generator_block(const std::string& invocation) {
  return json{{"tool", "sgnav"}, {"version", kVersion}, {"invocation", invocation}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

LoadReport load_ethucy(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  SceneBuilder builder;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (blank_or_comment(lines[i])) continue;
    std::istringstream ss(lines[i]);
    double frame = 0, id = 0, x = 0, y = 0;
    if (!(ss >> frame >> id >> x >> y))
      throw ParseError("expected 'frame ped_id x y'", line_no);
    std::string rest;
    if (ss >> rest) throw ParseError("unexpected trailing field '" + rest + "'", line_no);
    builder.add(to_frame(frame, line_no), static_cast<PedestrianId>(to_frame(id, line_no)),
                {x, y}, line_no);
  }
  return std::move(builder).finish();
}

LoadReport load_jsonl(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  SceneBuilder builder;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    json row;
    try {
      row = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!row.is_object() || !row.contains("frame") || !row.contains("id") ||
        !row.contains("x") || !row.contains("y"))
      throw ParseError("expected an object with frame, id, x, y", line_no);
    try {
      builder.add(row.at("frame").get<FrameId>(),
                  row.at("id").get<PedestrianId>(),
                  {row.at("x").get<double>(), row.at("y").get<double>()}, line_no);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad field type: ") + e.what(), line_no);
    }
  }
  return std::move(builder).finish();
}

void save_jsonl(const std::filesystem::path& path, const Scene& scene) {
  struct Row {
    FrameId frame;
    PedestrianId id;
    Vec2 pos;
  };
  std::vector<Row> rows;
  for (const auto& [id, track] : scene.tracks)
    for (const TrackSample& s : track.samples) rows.push_back({s.frame, id, s.pos});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
  });

  auto out = open_out(path);
  for (const Row& r : rows) {
    const json obj{{"frame", r.frame}, {"id", r.id}, {"x", r.pos.x}, {"y", r.pos.y}};
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

LoadReport load_mot15(const std::filesystem::path& path,
                      const std::optional<CameraModel>& camera,
                      const std::optional<DepthGrid>& depth) {
  const auto lines = split_lines(read_file(path));
  SceneBuilder builder;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (blank_or_comment(lines[i])) continue;
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 10)
      throw ParseError("expected 10 comma-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    const FrameId frame = to_frame(parse_double_field(fields[0], line_no, "frame"), line_no);
    const auto id = static_cast<PedestrianId>(
        to_frame(parse_double_field(fields[1], line_no, "id"), line_no));
    const double bb_left = parse_double_field(fields[2], line_no, "bb_left");
    const double bb_top = parse_double_field(fields[3], line_no, "bb_top");
    const double bb_width = parse_double_field(fields[4], line_no, "bb_width");
    const double bb_height = parse_double_field(fields[5], line_no, "bb_height");
    parse_double_field(fields[6], line_no, "conf");
    const double wx = parse_double_field(fields[7], line_no, "x");
    const double wy = parse_double_field(fields[8], line_no, "y");
    parse_double_field(fields[9], line_no, "z");

    if (wx > -1.0 && wy > -1.0) {
      builder.add(frame, id, {wx, wy}, line_no);
      continue;
    }
    if (!camera || !depth)
      throw ParseError(
          "world coordinates absent; provide a camera model and depth grid to recover "
          "positions from bounding boxes",
          line_no);
    const Vec2 foot{bb_left + bb_width / 2.0, bb_top + bb_height};
    const double d = depth->sample(foot.x, foot.y);
    if (!(d > 0.0)) {
      warnings.push_back("line " + std::to_string(line_no) +
                         ": nonpositive depth at bbox foot point, row skipped");
      continue;
    }
    builder.add(frame, id, localize({foot, d}, *camera, /*centered=*/true), line_no);
  }
  LoadReport report = std::move(builder).finish();
  report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
  return report;
}

LoadReport load_trajectories(const std::filesystem::path& path, const std::string& format,
                             const std::optional<CameraModel>& camera,
                             const std::optional<DepthGrid>& depth) {
  if (format == "ethucy") return load_ethucy(path);
  if (format == "jsonl") return load_jsonl(path);
  if (format == "mot15") return load_mot15(path, camera, depth);
  throw std::invalid_argument("unknown trajectory format '" + format +
                              "' (expected ethucy, mot15, or jsonl)");
}

void GroupAnnotation::validate() const {
  for (const auto& [frame, groups] : frames) {
    std::set<PedestrianId> seen;
    for (const GroupBox& g : groups) {
      if (g.members.empty())
        throw std::invalid_argument("annotation group without members at frame " +
                                    std::to_string(frame));
      for (PedestrianId p : g.members)
        if (!seen.insert(p).second)
          throw std::invalid_argument("pedestrian " + std::to_string(p) +
                                      " annotated twice at frame " + std::to_string(frame));
      if (g.bbox && (!((*g.bbox)[2] > 0.0) || !((*g.bbox)[3] > 0.0)))
        throw std::invalid_argument("annotation bbox must have positive size at frame " +
                                    std::to_string(frame));
    }
  }
}

GroupAnnotation load_group_annotation(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("group annotation is not valid JSON: " + std::string(e.what()));
  }
  GroupAnnotation ann;
  try {
    for (const json& frame_entry : doc.at("frames")) {
      const FrameId frame = frame_entry.at("frame").get<FrameId>();
      std::vector<GroupBox>& groups = ann.frames[frame];
      for (const json& g : frame_entry.at("groups")) {
        GroupBox box;
        box.group_id = g.at("group_id").get<GroupId>();
        box.members = g.at("members").get<std::vector<PedestrianId>>();
        std::sort(box.members.begin(), box.members.end());
        if (g.contains("bbox")) {
          const auto b = g.at("bbox").get<std::vector<double>>();
          if (b.size() != 4)
            throw ParseError("bbox must be [left, top, width, height] at frame " +
                             std::to_string(frame));
          box.bbox = std::array<double, 4>{b[0], b[1], b[2], b[3]};
        }
        groups.push_back(std::move(box));
      }
    }
  } catch (const json::exception& e) {
    throw ParseError("group annotation is missing fields: " + std::string(e.what()));
  }
  ann.validate();
  return ann;
}

void save_group_annotation(const std::filesystem::path& path, const GroupAnnotation& ann,
                           const std::string& invocation) {
  ann.validate();
  json frames = json::array();
  for (const auto& [frame, groups] : ann.frames) {
    json group_list = json::array();
    for (const GroupBox& g : groups) {
      json entry{{"group_id", g.group_id}, {"members", g.members}};
      if (g.bbox) entry["bbox"] = *g.bbox;
      group_list.push_back(std::move(entry));
    }
    frames.push_back(json{{"frame", frame}, {"groups", std::move(group_list)}});
  }
  const json doc{{"format_version", 1},
                 {"generator", generator_block(invocation)},
                 {"frames", std::move(frames)}};
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::map<FrameId, Grouping> annotation_groupings(const GroupAnnotation& ann) {
  std::map<FrameId, Grouping> out;
  for (const auto& [frame, groups] : ann.frames) {
    std::vector<std::vector<PedestrianId>> members;
    members.reserve(groups.size());
    for (const GroupBox& g : groups) members.push_back(g.members);
    out.emplace(frame, make_grouping(frame, members));
  }
  return out;
}

GroupAnnotation annotation_from_groupings(const std::map<FrameId, Grouping>& groupings) {
  GroupAnnotation ann;
  for (const auto& [frame, grouping] : groupings) {
    std::vector<GroupBox>& groups = ann.frames[frame];
    for (const auto& [gid, members] : grouping.assignments)
      groups.push_back(GroupBox{gid, members, std::nullopt});
  }
  return ann;
}

namespace {

// Partition restricted to `keep`, with groups re-keyed to min member.
Grouping restrict_grouping(const Grouping& g, const std::set<PedestrianId>& keep) {
  std::vector<std::vector<PedestrianId>> members;
  for (const auto& [gid, peds] : g.assignments) {
    std::vector<PedestrianId> kept;
    for (PedestrianId p : peds)
      if (keep.count(p)) kept.push_back(p);
    if (!kept.empty()) members.push_back(std::move(kept));
  }
  return make_grouping(g.window_start_frame, members);
}

std::set<PedestrianId> grouping_peds(const Grouping& g) {
  std::set<PedestrianId> peds;
  for (const auto& [gid, members] : g.assignments) peds.insert(members.begin(), members.end());
  return peds;
}

bool partitions_match(const Grouping& a, const Grouping& b) {
  std::set<PedestrianId> shared;
  const auto pa = grouping_peds(a);
  const auto pb = grouping_peds(b);
  std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(),
                        std::inserter(shared, shared.begin()));
  return restrict_grouping(a, shared).assignments == restrict_grouping(b, shared).assignments;
}

}  // namespace

RecoveryReport grouping_recovery(const std::map<FrameId, Grouping>& actual,
                                 const std::map<FrameId, Grouping>& truth) {
  RecoveryReport report;
  for (const auto& [frame, grouping] : actual) {
    const Grouping* reference = nullptr;
    if (truth.size() == 1) {
      reference = &truth.begin()->second;
    } else {
      auto it = truth.find(frame);
      if (it == truth.end()) continue;
      reference = &it->second;
    }
    ++report.frames_compared;
    if (partitions_match(grouping, *reference)) ++report.frames_matched;
  }
  if (report.frames_compared > 0)
    report.rate = static_cast<double>(report.frames_matched) / report.frames_compared;
  return report;
}

void write_recovery_csv(const std::filesystem::path& path, const RecoveryReport& report,
                        const std::string& invocation) {
  auto out = open_out(path);
  write_artifact_header(out, invocation);
  out << "frames_compared,frames_matched,recovery_rate\n";
  out << report.frames_compared << ',' << report.frames_matched << ','
      << format_double(report.rate) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void SynthConfig::validate() const {
  if (pedestrians < 1) throw std::invalid_argument("need at least one pedestrian");
  if (group_size_weights.empty())
    throw std::invalid_argument("group size weights must be nonempty");
  double sum = 0.0;
  for (double w : group_size_weights) {
    if (w < 0.0) throw std::invalid_argument("group size weights must be nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("group size weights must not all be zero");
  if (!(speed_min > 0.0) || speed_max < speed_min)
    throw std::invalid_argument("need 0 < speed_min <= speed_max");
  if (jitter_sigma < 0.0) throw std::invalid_argument("jitter sigma must be nonnegative");
  if (duration_steps < 1) throw std::invalid_argument("duration must be at least one step");
  if (frame_stride < 1) throw std::invalid_argument("frame stride must be >= 1");
  if (!(area_half_width > 0.0)) throw std::invalid_argument("area must be positive");
}

SynthResult synthesize(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  struct Spawn {
    std::vector<PedestrianId> members;
    Vec2 start;
    double heading;
    double speed;
  };

  // Carve the crowd into groups and give each group its base path.
  std::vector<Spawn> spawns;
  double weight_sum = 0.0;
  for (double w : cfg.group_size_weights) weight_sum += w;
  PedestrianId next_id = 1;
  int remaining = cfg.pedestrians;
  while (remaining > 0) {
    double pick = rng.uniform() * weight_sum;
    int size = static_cast<int>(cfg.group_size_weights.size());
    for (std::size_t k = 0; k < cfg.group_size_weights.size(); ++k) {
      pick -= cfg.group_size_weights[k];
      if (pick < 0.0) {
        size = static_cast<int>(k) + 1;
        break;
      }
    }
    size = std::min(size, remaining);
    Spawn spawn;
    for (int m = 0; m < size; ++m) spawn.members.push_back(next_id++);
    spawn.start = {rng.uniform(-cfg.area_half_width, cfg.area_half_width),
                   rng.uniform(-cfg.area_half_width, cfg.area_half_width)};
    spawn.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    spawn.speed = rng.uniform(cfg.speed_min, cfg.speed_max);
    spawns.push_back(std::move(spawn));
    remaining -= size;
  }

  const double dt = 0.4;
  constexpr double kFormationSpacing = 0.6;  // side-by-side gap, meters
  const double curvature =
      cfg.path == SynthConfig::Path::kArc ? cfg.arc_curvature : 0.0;

  Scene scene;
  for (int t = 0; t < cfg.duration_steps; ++t)
    scene.frames.push_back(static_cast<FrameId>(t) * cfg.frame_stride);
  for (const Spawn& spawn : spawns)
    for (PedestrianId id : spawn.members) scene.tracks[id].ped_id = id;

  for (int t = 0; t < cfg.duration_steps; ++t) {
    const FrameId frame = scene.frames[t];
    for (const Spawn& spawn : spawns) {
      const double s = spawn.speed * t * dt;  // distance along the base path
      Vec2 center;
      double heading_now = spawn.heading;
      if (std::abs(curvature) < 1e-12) {
        center = spawn.start + Vec2{std::cos(spawn.heading), std::sin(spawn.heading)} * s;
      } else {
        heading_now = spawn.heading + curvature * s;
        center = spawn.start + Vec2{(std::sin(heading_now) - std::sin(spawn.heading)),
                                    (std::cos(spawn.heading) - std::cos(heading_now))} /
                                   curvature;
      }
      const Vec2 across{-std::sin(heading_now), std::cos(heading_now)};
      const double mid = (static_cast<double>(spawn.members.size()) - 1.0) / 2.0;
      for (std::size_t m = 0; m < spawn.members.size(); ++m) {
        Vec2 pos = center + across * ((static_cast<double>(m) - mid) * kFormationSpacing);
        if (cfg.jitter_sigma > 0.0) {
          pos.x += cfg.jitter_sigma * rng.normal();
          pos.y += cfg.jitter_sigma * rng.normal();
        }
        scene.tracks[spawn.members[m]].samples.push_back({frame, pos});
      }
    }
  }
  scene.validate();

  std::vector<std::vector<PedestrianId>> member_lists;
  member_lists.reserve(spawns.size());
  for (const Spawn& spawn : spawns) member_lists.push_back(spawn.members);

  return SynthResult{std::move(scene), make_grouping(0, member_lists)};
}

CameraModel load_camera(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("camera file is not valid JSON: " + std::string(e.what()));
  }
  CameraModel cam;
  try {
    cam.fov = doc.at("fov").get<double>();
    cam.image_width = doc.at("image_width").get<int>();
    cam.image_height = doc.at("image_height").get<int>();
  } catch (const json::exception& e) {
    throw ParseError("camera file is missing fields: " + std::string(e.what()));
  }
  cam.validate();
  return cam;
}

DepthGrid load_depth_csv(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  DepthGrid grid;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank_or_comment(lines[i])) continue;
    const auto fields = split_csv(lines[i]);
    if (grid.width == 0)
      grid.width = static_cast<int>(fields.size());
    else if (static_cast<int>(fields.size()) != grid.width)
      throw ParseError("ragged depth grid row", static_cast<int>(i) + 1);
    for (const std::string& f : fields)
      grid.values.push_back(parse_double_field(f, static_cast<int>(i) + 1, "depth"));
    ++grid.height;
  }
  if (grid.width == 0 || grid.height == 0) throw ParseError("empty depth grid");
  return grid;
}

DepthGrid load_depth_pgm(const std::filesystem::path& path, double meters_per_unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());

  auto next_token = [&in]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);  // drop the comment
        continue;
      }
      return tok;
    }
    throw ParseError("truncated PGM header");
  };

  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5")
    throw ParseError("not a PGM file (expected P2 or P5, got '" + magic + "')");
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const long maxval = std::stol(next_token());
  if (width < 1 || height < 1) throw ParseError("PGM has empty dimensions");
  if (maxval < 1 || maxval > 65535) throw ParseError("PGM maxval out of range");

  DepthGrid grid;
  grid.width = width;
  grid.height = height;
  grid.values.reserve(static_cast<std::size_t>(width) * height);

  if (magic == "P2") {
    for (int i = 0; i < width * height; ++i) {
      long v = 0;
      if (!(in >> v)) throw ParseError("truncated P2 pixel data");
      grid.values.push_back(static_cast<double>(v) * meters_per_unit);
    }
  } else {
    in.get();  // the single whitespace byte after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw ParseError("truncated P5 pixel data");
    for (std::size_t i = 0; i < raw.size(); i += bytes) {
      const long v = bytes == 2 ? (raw[i] << 8) | raw[i + 1] : raw[i];  // MSB first
      grid.values.push_back(static_cast<double>(v) * meters_per_unit);
    }
  }
  return grid;
}

DepthGrid load_depth(const std::filesystem::path& path, double meters_per_unit) {
  return path.extension() == ".pgm" ? load_depth_pgm(path, meters_per_unit)
                                    : load_depth_csv(path);
}

void write_artifact_header(std::ostream& out, const std::string& invocation) {
  out << "# sgnav " << kVersion << " | " << invocation << '\n';
}

void write_loss_csv(const std::filesystem::path& path,
                    const std::vector<double>& epoch_mean_nll,
                    const std::string& invocation) {
  auto out = open_out(path);
  write_artifact_header(out, invocation);
  out << "epoch,mean_nll\n";
  for (std::size_t i = 0; i < epoch_mean_nll.size(); ++i)
    out << (i + 1) << ',' << format_double(epoch_mean_nll[i]) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<PredictionRow> prediction_rows(const Scene& scene, int stride,
                                           const WindowBatch& batch,
                                           const std::vector<PredictionHorizon>& horizons) {
  if (batch.windows.size() != horizons.size())
    throw std::invalid_argument("windows/horizons size mismatch");
  std::vector<PredictionRow> rows;
  const FrameId start_frame = step_frame(scene, stride, batch.start_step);
  for (std::size_t i = 0; i < batch.windows.size(); ++i) {
    const EntityWindow& win = batch.windows[i];
    const auto per_person = per_person_predictions(win, horizons[i]);
    for (const auto& [ped, points] : per_person) {
      for (int k = 0; k < kPredictedSteps; ++k) {
        PredictionRow row;
        row.start_step = batch.start_step;
        row.start_frame = start_frame;
        row.entity_id = win.entity_id;
        row.ped_id = ped;
        row.step = k + 1;
        row.pred = points[k];
        if (horizons[i].gaussians) {
          row.entity = (*horizons[i].gaussians)[k];
        } else {
          row.entity.mu = horizons[i].points[k];
          row.entity.sigma = {0.0, 0.0};  // marks a point prediction
          row.entity.rho = 0.0;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

namespace {
constexpr const char* kPredictionHeader =
    "start_step,start_frame,entity,ped,step,pred_x,pred_y,mu_x,mu_y,sigma_x,sigma_y,rho";
}

void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRow>& rows,
                           const std::string& invocation) {
  auto out = open_out(path);
  write_artifact_header(out, invocation);
  out << kPredictionHeader << '\n';
  for (const PredictionRow& r : rows) {
    out << r.start_step << ',' << r.start_frame << ',' << r.entity_id << ',' << r.ped_id
        << ',' << r.step << ',' << format_double(r.pred.x) << ',' << format_double(r.pred.y)
        << ',' << format_double(r.entity.mu.x) << ',' << format_double(r.entity.mu.y) << ','
        << format_double(r.entity.sigma.x) << ',' << format_double(r.entity.sigma.y) << ','
        << format_double(r.entity.rho) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path) {
  const auto lines = split_lines(read_file(path));
  std::vector<PredictionRow> rows;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (blank_or_comment(lines[i])) continue;
    if (!header_seen) {
      if (lines[i] != kPredictionHeader)
        throw ParseError("unexpected predictions header '" + lines[i] + "'", line_no);
      header_seen = true;
      continue;
    }
    const auto f = split_csv(lines[i]);
    if (f.size() != 12) throw ParseError("expected 12 fields", line_no);
    PredictionRow r;
    r.start_step = static_cast<int>(parse_double_field(f[0], line_no, "start_step"));
    r.start_frame = to_frame(parse_double_field(f[1], line_no, "start_frame"), line_no);
    r.entity_id = static_cast<GroupId>(parse_double_field(f[2], line_no, "entity"));
    r.ped_id = static_cast<PedestrianId>(parse_double_field(f[3], line_no, "ped"));
    r.step = static_cast<int>(parse_double_field(f[4], line_no, "step"));
    if (r.step < 1 || r.step > kPredictedSteps)
      throw ParseError("step out of range", line_no);
    r.pred = {parse_double_field(f[5], line_no, "pred_x"),
              parse_double_field(f[6], line_no, "pred_y")};
    r.entity.mu = {parse_double_field(f[7], line_no, "mu_x"),
                   parse_double_field(f[8], line_no, "mu_y")};
    r.entity.sigma = {parse_double_field(f[9], line_no, "sigma_x"),
                      parse_double_field(f[10], line_no, "sigma_y")};
    r.entity.rho = parse_double_field(f[11], line_no, "rho");
    rows.push_back(r);
  }
  if (!header_seen) throw ParseError("predictions file has no header row");
  return rows;
}

std::vector<PersonWindowPrediction> to_person_windows(const std::vector<PredictionRow>& rows) {
  std::map<std::tuple<int, GroupId, PedestrianId>, PersonWindowPrediction> grouped;
  std::map<std::tuple<int, GroupId, PedestrianId>, int> step_masks;
  for (const PredictionRow& r : rows) {
    const auto key = std::make_tuple(r.start_step, r.entity_id, r.ped_id);
    auto [it, fresh] = grouped.try_emplace(key);
    if (fresh) {
      it->second.start_step = r.start_step;
      it->second.entity_id = r.entity_id;
      it->second.ped_id = r.ped_id;
    }
    int& mask = step_masks[key];
    const int bit = 1 << (r.step - 1);
    if (mask & bit)
      throw std::invalid_argument("duplicate prediction step for pedestrian " +
                                  std::to_string(r.ped_id));
    mask |= bit;
    it->second.points[r.step - 1] = r.pred;
  }
  std::vector<PersonWindowPrediction> out;
  out.reserve(grouped.size());
  for (const auto& [key, pw] : grouped) {
    if (step_masks[key] != (1 << kPredictedSteps) - 1)
      throw std::invalid_argument("incomplete prediction horizon for pedestrian " +
                                  std::to_string(pw.ped_id));
    out.push_back(pw);
  }
  return out;
}

void write_metrics_csv(const std::filesystem::path& path, const MetricReport& report,
                       const std::string& invocation) {
  auto out = open_out(path);
  write_artifact_header(out, invocation);
  out << "# distance: " << (report.squared ? "squared" : "euclidean") << '\n';
  out << "# excluded_person_windows: " << report.excluded << '\n';
  out << "scope,id,windows,ade,fde\n";
  out << "overall,," << report.evaluated << ',' << format_double(report.ade) << ','
      << format_double(report.fde) << '\n';
  for (const PersonErrors& p : report.per_person)
    out << "person," << p.ped_id << ',' << p.windows << ',' << format_double(p.ade) << ','
        << format_double(p.fde) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void write_bench_csv(const std::filesystem::path& path, const BenchReport& report,
                     const std::string& invocation) {
  auto out = open_out(path);
  write_artifact_header(out, invocation);
  out << "# pedestrians: " << report.pedestrians << '\n';
  out << "# group_fraction: " << format_double(report.group_fraction) << '\n';
  out << "method,median_ms,entities,warmup,repetitions\n";
  for (const MethodTiming& m : report.methods) {
    const int entities = m.kind == PredictorKind::kSocialGroupLstm
                             ? report.grouped_entities
                             : report.singleton_entities;
    out << to_string(m.kind) << ',' << format_double(m.median_ms) << ',' << entities << ','
        << report.warmup << ',' << report.repetitions << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_trace_csv(const std::filesystem::path& path, const SimResult& result,
                     const std::string& invocation) {
  auto out = open_out(path);
  write_artifact_header(out, invocation);
  out << "step,x_r,y_r,phi,u_s,u_phi,min_clearance\n";
  for (const TraceStep& s : result.trace) {
    out << s.step << ',' << format_double(s.state.pos.x) << ','
        << format_double(s.state.pos.y) << ',' << format_double(s.state.phi) << ','
        << format_double(s.control.u_s) << ',' << format_double(s.control.u_phi) << ','
        << format_double(s.min_clearance) << '\n';
  }
  out << "# outcome: " << to_string(result.outcome) << '\n';
  out << "# path_length: " << format_double(result.path_length) << '\n';
  for (const std::string& e : result.events) out << "# event: " << e << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void write_trace_svg(const std::filesystem::path& path, const SimResult& result,
                     const Scene& scene, const std::string& invocation) {
  // Overhead view: pedestrian tracks in gray, robot path in blue, goal ring in
  // green. World y points up, SVG y points down, so y is negated.
  double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
  auto grow = [&](Vec2 p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, -p.y);
    max_y = std::max(max_y, -p.y);
  };
  for (const TraceStep& s : result.trace) grow(s.state.pos);
  grow(result.final_state.pos);
  for (const auto& [id, track] : scene.tracks)
    for (const TrackSample& s : track.samples) grow(s.pos);

  const double pad = 2.0;
  min_x -= pad;
  min_y -= pad;
  max_x += pad;
  max_y += pad;

  // The y flip is written as 0.0 - y so a zero stays "0" instead of "-0".
  auto fmt_point = [](Vec2 p) {
    return format_double(p.x) + "," + format_double(0.0 - p.y);
  };

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(min_x) << ' '
      << format_double(min_y) << ' ' << format_double(max_x - min_x) << ' '
      << format_double(max_y - min_y) << "\" width=\"800\">\n";
  out << "<!-- sgnav " << kVersion << " | " << invocation << " -->\n";
  out << "<rect x=\"" << format_double(min_x) << "\" y=\"" << format_double(min_y)
      << "\" width=\"" << format_double(max_x - min_x) << "\" height=\""
      << format_double(max_y - min_y) << "\" fill=\"#ffffff\"/>\n";

  for (const auto& [id, track] : scene.tracks) {
    if (track.samples.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"#9aa0a6\" stroke-width=\"0.08\" points=\"";
    for (std::size_t i = 0; i < track.samples.size(); ++i) {
      if (i) out << ' ';
      out << fmt_point(track.samples[i].pos);
    }
    out << "\"/>\n";
    out << "<circle cx=\"" << format_double(track.samples.back().pos.x) << "\" cy=\""
        << format_double(0.0 - track.samples.back().pos.y)
        << "\" r=\"0.15\" fill=\"#9aa0a6\"/>\n";
  }

  if (!result.trace.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#1a73e8\" stroke-width=\"0.12\" points=\"";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      if (i) out << ' ';
      out << fmt_point(result.trace[i].state.pos);
    }
    out << ' ' << fmt_point(result.final_state.pos) << "\"/>\n";
    out << "<circle cx=\"" << format_double(result.trace.front().state.pos.x) << "\" cy=\""
        << format_double(0.0 - result.trace.front().state.pos.y)
        << "\" r=\"0.2\" fill=\"#1a73e8\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("scenario is not valid JSON: " + std::string(e.what()));
  }

  Scenario sc;
  try {
    const json& robot = doc.at("robot");
    if (robot.contains("radius")) sc.robot.radius = robot.at("radius").get<double>();
    if (robot.contains("max_speed")) sc.robot.max_speed = robot.at("max_speed").get<double>();
    if (robot.contains("max_steering"))
      sc.robot.max_steering = robot.at("max_steering").get<double>();
    if (robot.contains("wheelbase")) sc.robot.wheelbase = robot.at("wheelbase").get<double>();
    if (robot.contains("personal_radius"))
      sc.robot.personal_radius = robot.at("personal_radius").get<double>();
    if (robot.contains("speed_samples"))
      sc.robot.speed_samples = robot.at("speed_samples").get<int>();
    if (robot.contains("steering_samples"))
      sc.robot.steering_samples = robot.at("steering_samples").get<int>();
    if (robot.contains("steering_cost"))
      sc.robot.steering_cost = robot.at("steering_cost").get<double>();

    const auto start = robot.at("start").get<std::vector<double>>();
    if (start.size() != 3) throw ParseError("robot start must be [x, y, phi]");
    sc.start = RobotState{{start[0], start[1]}, start[2]};
    const auto goal = robot.at("goal").get<std::vector<double>>();
    if (goal.size() != 2) throw ParseError("robot goal must be [x, y]");
    sc.robot.goal = {goal[0], goal[1]};

    if (doc.contains("dt")) sc.scene.dt = doc.at("dt").get<double>();
    if (doc.contains("max_steps")) sc.max_steps = doc.at("max_steps").get<int>();

    if (doc.contains("grouping")) {
      const json& g = doc.at("grouping");
      if (g.contains("max_pair_distance"))
        sc.grouping.max_pair_distance = g.at("max_pair_distance").get<double>();
      if (g.contains("max_speed_diff"))
        sc.grouping.max_speed_diff = g.at("max_speed_diff").get<double>();
      if (g.contains("max_heading_diff"))
        sc.grouping.max_heading_diff = g.at("max_heading_diff").get<double>();
      if (g.contains("min_persist_steps"))
        sc.grouping.min_persist_steps = g.at("min_persist_steps").get<int>();
    }

    const std::string kind = doc.value("predictor", std::string("linear"));
    sc.predictor.kind = predictor_kind_from_string(kind);
    if (sc.predictor.kind != PredictorKind::kLinear) {
      if (!doc.contains("model"))
        throw ParseError("scenario with a learned predictor needs a 'model' file");
      const std::filesystem::path model_path =
          path.parent_path() / doc.at("model").get<std::string>();
      LoadedModel loaded = load_model(model_path);
      if (loaded.config.kind != sc.predictor.kind)
        throw ParseError("scenario predictor '" + kind + "' does not match model kind '" +
                         to_string(loaded.config.kind) + "'");
      sc.predictor = loaded.config;
      sc.params = std::move(loaded.params);
    }

    std::set<FrameId> frames;
    for (const json& t : doc.at("tracks")) {
      const auto id = t.at("id").get<PedestrianId>();
      const int start_step = t.value("start_step", 0);
      const auto points = t.at("points").get<std::vector<std::vector<double>>>();
      Track& track = sc.scene.tracks[id];
      track.ped_id = id;
      for (std::size_t k = 0; k < points.size(); ++k) {
        if (points[k].size() != 2) throw ParseError("track points must be [x, y] pairs");
        const FrameId frame = static_cast<FrameId>(start_step) + static_cast<FrameId>(k);
        track.samples.push_back({frame, {points[k][0], points[k][1]}});
        frames.insert(frame);
      }
    }
    sc.scene.frames.assign(frames.begin(), frames.end());
  } catch (const json::exception& e) {
    throw ParseError("scenario is missing fields: " + std::string(e.what()));
  }

  sc.validate();
  return sc;
}

}  // namespace sgnav
