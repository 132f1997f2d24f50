// Generates the committed end-to-end scenario suite.
//
// Every scenario is an arm moving along a straight joint-space seed with 1-3
// obstacles placed next to a mid-path pose of that seed, a small gap away from
// the arm, so that the noiseless shortest path grazes them. Placements that
// would cut through the seed path, or crowd the start or goal pose, are
// redrawn.

#include "ccplan/io/scenario.hpp"
#include "ccplan/kinematics.hpp"
#include "ccplan/planner.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <random>

namespace {

using namespace ccplan;
using ojson = nlohmann::ordered_json;

struct SuiteConfig {
  std::uint64_t seed = 20261016;
  std::size_t two_link = 12;
  std::size_t three_link = 12;
  double gap_min = 0.01, gap_max = 0.05;
  double noise_min = 0.5, noise_max = 3.0;
  double endpoint_clearance = 0.25;
  double path_clearance = 0.005;
};

class Generator {
 public:
  explicit Generator(const SuiteConfig& config) : config_(config), rng_(config.seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  ojson scenario(std::size_t index, std::size_t links) {
    for (int attempt = 0;; ++attempt) {
      if (auto s = try_scenario(index, links)) return *s;
      if (attempt > 1000) throw std::runtime_error("could not place obstacles");
    }
  }

 private:
  ArmSpec make_arm(std::size_t links) const {
    ArmSpec arm;
    arm.link_lengths = links == 2 ? std::vector<double>{1.0, 0.8} : std::vector<double>{0.8, 0.6, 0.5};
    arm.link_radii.assign(links, links == 2 ? 0.05 : 0.04);
    arm.joint_limits.assign(links, JointLimit{-std::numbers::pi, std::numbers::pi});
    return arm;
  }

  // Smallest clearance along the seed, sampled finely enough that a link
  // cannot skip over a 0.1 m obstacle between samples.
  double path_clearance(const NominalTrajectory& seed, const Environment& env) const {
    const Mat q = seed.positions();
    double best = kNoObstacleClearance;
    for (Eigen::Index t = 0; t + 1 < q.cols(); ++t) {
      for (int k = 0; k <= 50; ++k) {
        const Vec qs = q.col(t) + (k / 50.0) * (q.col(t + 1) - q.col(t));
        best = std::min(best, min_clearance(qs, env));
      }
    }
    return best;
  }

  std::optional<Obstacle> place(const Vec& q_mid, const Vec& dq, const ArmSpec& arm, double gap) {
    const auto chain = forward_kinematics(q_mid, arm).joints;
    const std::size_t anchor = static_cast<std::size_t>(integer(1, static_cast<int>(arm.joints())));
    const Vec2 p = chain[anchor];

    // Perpendicular to the anchor's direction of travel, either side.
    Vec2 vel = Vec2::Zero();
    {
      const double h = 1e-6;
      const Vec2 ahead = forward_kinematics(q_mid + h * dq, arm).joints[anchor];
      vel = (ahead - p) / h;
    }
    Vec2 dir = vel.norm() > 1e-9 ? Vec2(-vel.y(), vel.x()).normalized() : (p - arm.base).normalized();
    if (integer(0, 1) == 1) dir = -dir;

    Environment probe{arm, {}};
    const int kind = integer(0, 5);  // circle 3/6, polygon 2/6, half-plane 1/6
    if (kind == 5) {
      double reach = -std::numeric_limits<double>::infinity();
      for (const auto& x : chain) reach = std::max(reach, dir.dot(x));
      const double c = reach + arm.link_radii[0] + gap;
      return HalfPlane{-dir, -c};
    }

    const double size = uniform(0.05, 0.15);
    const int sides = integer(3, 5);
    const double phase = uniform(0.0, 2.0 * std::numbers::pi);
    auto make = [&](double d) -> Obstacle {
      const Vec2 centre = p + d * dir;
      if (kind <= 2) return Circle{centre, size};
      ConvexPolygon poly;
      for (int i = 0; i < sides; ++i) {
        const double a = phase + 2.0 * std::numbers::pi * i / sides;
        poly.vertices.push_back(centre + size * Vec2(std::cos(a), std::sin(a)));
      }
      return poly;
    };
    auto clearance_at = [&](double d) {
      probe.obstacles = {make(d)};
      return min_clearance(q_mid, probe);
    };
    double lo = 0.0, hi = 2.0;
    if (!(clearance_at(lo) < gap && clearance_at(hi) > gap)) return std::nullopt;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (clearance_at(mid) < gap ? lo : hi) = mid;
    }
    return make(hi);
  }

  std::optional<ojson> try_scenario(std::size_t index, std::size_t links) {
    const ArmSpec arm = make_arm(links);
    Vec start(links), goal(links);
    const double sweep = uniform(1.5, 2.5) * (integer(0, 1) ? 1.0 : -1.0);
    start(0) = uniform(-1.2, 1.2) - 0.5 * sweep;
    goal(0) = start(0) + sweep;
    for (std::size_t j = 1; j < links; ++j) {
      start(j) = uniform(-1.2, 1.2);
      goal(j) = uniform(-1.2, 1.2);
    }
    if (!arm.within_limits(start) || !arm.within_limits(goal)) return std::nullopt;

    PlannerParams params;
    const NominalTrajectory seed = straight_line_seed(start, goal, params.horizon, params.dt, arm);
    const Mat q = seed.positions();

    Environment env{arm, {}};
    const int count = integer(1, 3);
    bool has_half_plane = false;
    for (int k = 0; k < count; ++k) {
      const double s = uniform(0.3, 0.7);
      const double gap = uniform(config_.gap_min, config_.gap_max);
      const auto t = static_cast<Eigen::Index>(std::lround(s * static_cast<double>(params.horizon)));
      const Vec dq = q.col(t + 1) - q.col(t);
      auto obstacle = place(q.col(t), dq, arm, gap);
      if (!obstacle) return std::nullopt;
      if (std::holds_alternative<HalfPlane>(*obstacle)) {
        if (has_half_plane) return std::nullopt;
        has_half_plane = true;
      }
      env.obstacles.push_back(*obstacle);
    }
    if (path_clearance(seed, env) < config_.path_clearance) return std::nullopt;
    if (min_clearance(start, env) < config_.endpoint_clearance) return std::nullopt;
    if (min_clearance(goal, env) < config_.endpoint_clearance) return std::nullopt;

    const double scale = uniform(config_.noise_min, config_.noise_max);
    char name[32];
    std::snprintf(name, sizeof name, "suite_%02zu_%zulink", index, links);

    ojson j;
    j["schema_version"] = io::kSchemaVersion;
    j["name"] = name;
    j["arm"] = {{"link_lengths", arm.link_lengths}, {"link_radii", arm.link_radii}};
    j["obstacles"] = ojson::array();
    for (const auto& o : env.obstacles) {
      if (const auto* c = std::get_if<Circle>(&o)) {
        j["obstacles"].push_back({{"type", "circle"}, {"center", {c->center.x(), c->center.y()}}, {"radius", c->radius}});
      } else if (const auto* h = std::get_if<HalfPlane>(&o)) {
        j["obstacles"].push_back(
            {{"type", "half_plane"}, {"normal", {h->normal.x(), h->normal.y()}}, {"offset", h->offset}});
      } else {
        ojson verts = ojson::array();
        for (const auto& v : std::get<ConvexPolygon>(o).vertices) verts.push_back({v.x(), v.y()});
        j["obstacles"].push_back({{"type", "polygon"}, {"vertices", verts}});
      }
    }
    j["noise"] = {
        {"process", {{"position", 1e-5 * scale}, {"velocity", 1e-4 * scale}}},
        {"observation", {{"covariance", {{1e-3 * scale, 0.0}, {0.0, 1e-3 * scale}}}}},
        {"initial", {{"position", 1e-3 * scale}, {"velocity", 1e-4 * scale}}},
    };
    j["query"] = {{"start", std::vector<double>(start.data(), start.data() + links)},
                  {"goal", std::vector<double>(goal.data(), goal.data() + links)}};
    j["planner"] = {{"chance_constraint", 0.1}};
    j["validation"] = {{"runs", 100}, {"base_seed", 1000 * index}};
    return j;
  }

  SuiteConfig config_;
  std::mt19937_64 rng_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write the end-to-end scenario suite"};
  std::string out = "scenarios/acceptance";
  SuiteConfig config;
  app.add_option("-o,--output", out, "Directory for the generated scenario files")->capture_default_str();
  app.add_option("--seed", config.seed, "Generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  Generator gen(config);
  std::size_t index = 0;
  try {
    for (std::size_t i = 0; i < config.two_link + config.three_link; ++i) {
      const std::size_t links = i < config.two_link ? 2 : 3;
      const ojson j = gen.scenario(index, links);
      const std::filesystem::path path =
          std::filesystem::path(out) / (j["name"].get<std::string>() + ".json");
      std::filesystem::create_directories(out);
      io::write_text(path, j.dump(2) + "\n");
      io::load_scenario(path);  // must parse back
      std::cout << path.string() << "\n";
      ++index;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
