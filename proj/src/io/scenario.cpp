#include "ccplan/io/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace ccplan::io {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ScenarioError(field + ": " + what);
}

// A JSON value together with the dotted path it was reached by, so every
// error can name its field.
class Node {
 public:
  Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const json& raw() const { return *value_; }
  const std::string& path() const { return path_; }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_->is_object()) fail(path_, "expected an object");
    for (const auto& [key, _] : value_->items()) {
      bool known = false;
      for (auto a : allowed) known = known || a == key;
      if (!known) fail(child_path(key), "unknown field");
    }
  }

  std::optional<Node> find(std::string_view key) const {
    const auto it = value_->find(std::string(key));
    if (it == value_->end() || it->is_null()) return std::nullopt;
    return Node(*it, child_path(key));
  }

  Node at(std::string_view key) const {
    auto n = find(key);
    if (!n) fail(child_path(key), "missing required field");
    return *n;
  }

  std::size_t size() const {
    if (!value_->is_array()) fail(path_, "expected an array");
    return value_->size();
  }

  Node operator[](std::size_t i) const {
    return Node((*value_)[i], path_ + "[" + std::to_string(i) + "]");
  }

  double number() const {
    if (!value_->is_number()) fail(path_, "expected a number");
    const double v = value_->get<double>();
    if (!std::isfinite(v)) fail(path_, "expected a finite number");
    return v;
  }

  std::uint64_t count() const {
    if (!value_->is_number_integer() || (value_->is_number_integer() && !value_->is_number_unsigned() &&
                                         value_->get<std::int64_t>() < 0)) {
      fail(path_, "expected a non-negative integer");
    }
    return value_->get<std::uint64_t>();
  }

  std::string string() const {
    if (!value_->is_string()) fail(path_, "expected a string");
    return value_->get<std::string>();
  }

  std::vector<double> numbers(std::optional<std::size_t> expected = std::nullopt) const {
    const std::size_t n = size();
    if (expected && n != *expected) {
      fail(path_, "expected " + std::to_string(*expected) + " entries, got " + std::to_string(n));
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back((*this)[i].number());
    return out;
  }

  Vec vec(std::optional<std::size_t> expected = std::nullopt) const {
    const auto v = numbers(expected);
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  Vec2 vec2() const {
    const auto v = numbers(2);
    return Vec2(v[0], v[1]);
  }

  Mat matrix(std::size_t rows, std::size_t cols) const {
    if (size() != rows) fail(path_, "expected " + std::to_string(rows) + " rows");
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = (*this)[r].numbers(cols);
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
  }

  // Depth of nested arrays along the first element: 2 for a matrix, 3 for a
  // list of matrices.
  int array_depth() const {
    int depth = 0;
    const json* cur = value_;
    while (cur->is_array() && !cur->empty()) {
      ++depth;
      cur = &(*cur)[0];
    }
    return depth;
  }

 private:
  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* value_;
  std::string path_;
};

template <typename F>
auto with_context(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ScenarioError(prefix + e.what());
  }
}

// Per-joint noise: either a list of 2x2 blocks or
// {"position": variance, "velocity": variance} applied to every joint.
std::vector<Mat2> joint_blocks(const Node& node, std::size_t joints) {
  if (node.raw().is_object()) {
    node.expect_object({"position", "velocity"});
    const double p = node.at("position").number();
    const double v = node.at("velocity").number();
    return ProcessNoiseModel::diagonal(joints, p, v).per_joint_covariance;
  }
  const std::size_t n = node.size();
  if (n != joints) fail(node.path(), "expected " + std::to_string(joints) + " joint blocks");
  std::vector<Mat2> blocks;
  for (std::size_t j = 0; j < n; ++j) blocks.push_back(node[j].matrix(2, 2));
  return blocks;
}

Mat block_diagonal(const std::vector<Mat2>& blocks) {
  const auto dim = static_cast<Eigen::Index>(2 * blocks.size());
  Mat m = Mat::Zero(dim, dim);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    m.block<2, 2>(static_cast<Eigen::Index>(2 * j), static_cast<Eigen::Index>(2 * j)) = blocks[j];
  }
  return m;
}

ArmSpec parse_arm(const Node& node) {
  node.expect_object({"link_lengths", "link_radii", "base", "joint_limits"});
  ArmSpec arm;
  arm.link_lengths = node.at("link_lengths").numbers();
  const std::size_t n = arm.link_lengths.size();
  arm.link_radii = node.find("link_radii") ? node.at("link_radii").numbers(n) : std::vector<double>(n, 0.0);
  if (auto base = node.find("base")) arm.base = base->vec2();
  if (auto limits = node.find("joint_limits")) {
    if (limits->size() != n) fail(limits->path(), "expected " + std::to_string(n) + " [low, high] pairs");
    for (std::size_t j = 0; j < n; ++j) {
      const auto pair = (*limits)[j].numbers(2);
      arm.joint_limits.push_back(JointLimit{pair[0], pair[1]});
    }
  } else {
    arm.joint_limits.assign(n, JointLimit{-std::numbers::pi, std::numbers::pi});
  }
  with_context("arm.", [&] { arm.validate(); });
  return arm;
}

Obstacle parse_obstacle(const Node& node) {
  if (!node.raw().is_object()) fail(node.path(), "expected an object");
  const std::string type = node.at("type").string();
  Obstacle out;
  if (type == "circle") {
    node.expect_object({"type", "center", "radius"});
    out = Circle{node.at("center").vec2(), node.at("radius").number()};
  } else if (type == "polygon") {
    node.expect_object({"type", "vertices"});
    const Node verts = node.at("vertices");
    ConvexPolygon poly;
    for (std::size_t i = 0; i < verts.size(); ++i) poly.vertices.push_back(verts[i].vec2());
    out = std::move(poly);
  } else if (type == "half_plane") {
    node.expect_object({"type", "normal", "offset"});
    out = HalfPlane{node.at("normal").vec2(), node.at("offset").number()};
  } else {
    fail(node.path() + ".type", "unknown obstacle type '" + type + "' (circle, polygon, half_plane)");
  }
  with_context(node.path() + ": ", [&] { validate_obstacle(out); });
  return out;
}

NoiseModel parse_noise(const Node* node, std::size_t joints, std::size_t horizon) {
  NoiseModel noise = NoiseModel::zero(joints);
  if (node == nullptr) return noise;
  node->expect_object({"process", "process_schedule", "observation", "initial"});
  if (auto p = node->find("process")) noise.process.per_joint_covariance = joint_blocks(*p, joints);
  if (auto s = node->find("process_schedule")) {
    if (s->size() != horizon) {
      fail(s->path(), "expected one entry per step (" + std::to_string(horizon) + ")");
    }
    for (std::size_t t = 0; t < horizon; ++t) {
      noise.process_schedule.push_back(ProcessNoiseModel{joint_blocks((*s)[t], joints)});
    }
  }
  if (auto o = node->find("observation")) {
    o->expect_object({"covariance", "scaling"});
    if (auto c = o->find("covariance")) noise.observation.noise_covariance = c->matrix(2, 2);
    if (auto w = o->find("scaling")) noise.observation.noise_scaling = w->matrix(2, 2);
  }
  if (auto i = node->find("initial")) {
    // A full 2n x 2n matrix (depth 2) or per-joint blocks / shorthand.
    if (i->raw().is_array() && i->array_depth() == 2) {
      noise.initial_covariance = i->matrix(2 * joints, 2 * joints);
    } else {
      noise.initial_covariance = block_diagonal(joint_blocks(*i, joints));
    }
  }
  with_context("", [&] { noise.observation.validate(); });
  with_context("", [&] { noise.validate(joints); });
  return noise;
}

void parse_planner(const Node* node, PlannerParams& p) {
  if (node == nullptr) return;
  node->expect_object({"horizon", "dt", "hit_in_distances", "penalized_configs", "d_safe", "d_step",
                       "penalty_radius", "max_iterations", "convergence_tolerance",
                       "chance_constraint", "time_budget", "risk_tolerance", "reallocation_rate",
                       "loop_nodes_per_dim", "final_nodes_per_dim", "penalty_schedule",
                       "descent_iterations", "edge_substeps"});
  auto num = [&](std::string_view key, double& out) {
    if (auto n = node->find(key)) out = n->number();
  };
  auto cnt = [&](std::string_view key, auto& out) {
    if (auto n = node->find(key)) out = static_cast<std::remove_reference_t<decltype(out)>>(n->count());
  };
  cnt("horizon", p.horizon);
  num("dt", p.dt);
  if (auto h = node->find("hit_in_distances")) p.hit_in_distances = h->numbers();
  if (auto pc = node->find("penalized_configs")) {
    for (std::size_t i = 0; i < pc->size(); ++i) {
      const Node entry = (*pc)[i];
      entry.expect_object({"q", "radius"});
      p.penalized_configs.push_back(PenalizedConfig{entry.at("q").vec(), entry.at("radius").number()});
    }
  }
  num("d_safe", p.d_safe);
  num("d_step", p.d_step);
  num("penalty_radius", p.penalty_radius);
  cnt("max_iterations", p.max_iterations);
  num("convergence_tolerance", p.convergence_tolerance);
  num("chance_constraint", p.chance_constraint);
  if (auto t = node->find("time_budget")) p.time_budget = t->number();
  if (auto t = node->find("risk_tolerance")) p.risk_tolerance = t->number();
  num("reallocation_rate", p.reallocation_rate);
  cnt("loop_nodes_per_dim", p.loop_nodes_per_dim);
  cnt("final_nodes_per_dim", p.final_nodes_per_dim);
  if (auto s = node->find("penalty_schedule")) p.penalty_schedule = s->numbers();
  cnt("descent_iterations", p.descent_iterations);
  cnt("edge_substeps", p.edge_substeps);
}

std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

ojson to_json(const Vec& v) { return ojson(std::vector<double>(v.data(), v.data() + v.size())); }

ojson to_json(const Mat& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

ojson blocks_to_json(const ProcessNoiseModel& model) {
  ojson out = ojson::array();
  for (const auto& b : model.per_joint_covariance) out.push_back(to_json(Mat(b)));
  return out;
}

ojson obstacle_to_json(const Obstacle& o) {
  ojson j;
  if (const auto* c = std::get_if<Circle>(&o)) {
    j["type"] = "circle";
    j["center"] = to_json(Vec(c->center));
    j["radius"] = c->radius;
  } else if (const auto* p = std::get_if<ConvexPolygon>(&o)) {
    j["type"] = "polygon";
    j["vertices"] = ojson::array();
    for (const auto& v : p->vertices) j["vertices"].push_back(to_json(Vec(v)));
  } else {
    const auto& h = std::get<HalfPlane>(o);
    j["type"] = "half_plane";
    j["normal"] = to_json(Vec(h.normal));
    j["offset"] = h.offset;
  }
  return j;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ScenarioError(source + ": syntax error at " + location(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  const Node root(doc, "");
  root.expect_object({"schema_version", "name", "arm", "obstacles", "noise", "controller", "query",
                      "planner", "validation"});
  if (auto v = root.find("schema_version")) {
    if (v->count() != static_cast<std::uint64_t>(kSchemaVersion)) {
      fail("schema_version", "unsupported version " + v->raw().dump() + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");
    }
  }

  Scenario s;
  s.name = root.find("name") ? root.at("name").string() : std::string("scenario");
  s.environment.arm = parse_arm(root.at("arm"));
  const std::size_t joints = s.environment.arm.joints();
  if (auto obstacles = root.find("obstacles")) {
    for (std::size_t i = 0; i < obstacles->size(); ++i) {
      s.environment.obstacles.push_back(parse_obstacle((*obstacles)[i]));
    }
  }

  if (auto c = root.find("controller")) {
    c->expect_object({"state_weight", "input_weight"});
    if (auto w = c->find("state_weight")) s.planner.controller.state = w->number();
    if (auto w = c->find("input_weight")) s.planner.controller.input = w->number();
  }
  const auto planner_node = root.find("planner");
  parse_planner(planner_node ? &*planner_node : nullptr, s.planner);
  with_context("", [&] { s.planner.validate(); });

  const auto noise_node = root.find("noise");
  s.noise = parse_noise(noise_node ? &*noise_node : nullptr, joints, s.planner.horizon);

  const Node query = root.at("query");
  query.expect_object({"start", "goal"});
  s.start = query.at("start").vec(joints);
  s.goal = query.at("goal").vec(joints);
  if (!s.environment.arm.within_limits(s.start)) fail("query.start", "outside the joint limits");
  if (!s.environment.arm.within_limits(s.goal)) fail("query.goal", "outside the joint limits");
  for (std::size_t i = 0; i < s.planner.penalized_configs.size(); ++i) {
    if (static_cast<std::size_t>(s.planner.penalized_configs[i].q.size()) != joints) {
      fail("planner.penalized_configs[" + std::to_string(i) + "].q",
           "expected " + std::to_string(joints) + " entries");
    }
  }

  if (auto v = root.find("validation")) {
    v->expect_object({"runs", "base_seed"});
    if (auto r = v->find("runs")) s.validation.runs = r->count();
    if (auto b = v->find("base_seed")) s.validation.base_seed = b->count();
    if (s.validation.runs < 1) fail("validation.runs", "must be at least 1");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  Scenario s = parse_scenario(text, path.string());
  if (!nlohmann::json::parse(text, nullptr, true, true).contains("name")) s.name = path.stem().string();
  return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = s.name;

  const ArmSpec& arm = s.environment.arm;
  ojson limits = ojson::array();
  for (const auto& l : arm.joint_limits) limits.push_back({l.low, l.high});
  j["arm"] = {{"link_lengths", arm.link_lengths},
              {"link_radii", arm.link_radii},
              {"base", to_json(Vec(arm.base))},
              {"joint_limits", limits}};

  j["obstacles"] = ojson::array();
  for (const auto& o : s.environment.obstacles) j["obstacles"].push_back(obstacle_to_json(o));

  ojson noise;
  noise["process"] = blocks_to_json(s.noise.process);
  if (!s.noise.process_schedule.empty()) {
    noise["process_schedule"] = ojson::array();
    for (const auto& p : s.noise.process_schedule) noise["process_schedule"].push_back(blocks_to_json(p));
  }
  noise["observation"] = {{"covariance", to_json(Mat(s.noise.observation.noise_covariance))},
                          {"scaling", to_json(Mat(s.noise.observation.noise_scaling))}};
  noise["initial"] = to_json(s.noise.initial_covariance);
  j["noise"] = std::move(noise);

  j["controller"] = {{"state_weight", s.planner.controller.state},
                     {"input_weight", s.planner.controller.input}};
  j["query"] = {{"start", to_json(s.start)}, {"goal", to_json(s.goal)}};

  const PlannerParams& p = s.planner;
  ojson planner;
  planner["horizon"] = p.horizon;
  planner["dt"] = p.dt;
  planner["hit_in_distances"] = p.effective_hit_in_distances();
  planner["penalized_configs"] = ojson::array();
  for (const auto& pc : p.penalized_configs) {
    planner["penalized_configs"].push_back({{"q", to_json(pc.q)}, {"radius", pc.radius}});
  }
  planner["d_safe"] = p.d_safe;
  planner["d_step"] = p.d_step;
  planner["penalty_radius"] = p.penalty_radius;
  planner["max_iterations"] = p.max_iterations;
  planner["convergence_tolerance"] = p.convergence_tolerance;
  planner["chance_constraint"] = p.chance_constraint;
  planner["time_budget"] = p.time_budget ? ojson(*p.time_budget) : ojson(nullptr);
  planner["risk_tolerance"] = p.effective_risk_tolerance();
  planner["reallocation_rate"] = p.reallocation_rate;
  planner["loop_nodes_per_dim"] = p.loop_nodes_per_dim;
  planner["final_nodes_per_dim"] = p.final_nodes_per_dim;
  planner["penalty_schedule"] = p.penalty_schedule;
  planner["descent_iterations"] = p.descent_iterations;
  planner["edge_substeps"] = p.edge_substeps;
  j["planner"] = std::move(planner);

  j["validation"] = {{"runs", s.validation.runs}, {"base_seed", s.validation.base_seed}};
  return j;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text(path, scenario_to_json(scenario).dump(2) + "\n");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed", path);
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("write failed", path);
}

}  // namespace ccplan::io
