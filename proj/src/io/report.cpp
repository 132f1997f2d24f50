#include "ccplan/io/report.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace ccplan::io {

namespace {

std::string format_flag(std::optional<bool> flag) {
  if (!flag) return "NA";
  return *flag ? "true" : "false";
}

// Fixed-precision text for drawing coordinates; SVG does not need round-trip digits.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<Vec2> clip_to_half_plane(const std::vector<Vec2>& poly, const HalfPlane& h) {
  // Keep the occupied side, normal . x <= offset.
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double da = h.normal.dot(a) - h.offset;
    const double db = h.normal.dot(b) - h.offset;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) out.push_back(a + (da / (da - db)) * (b - a));
  }
  return out;
}

std::string points_attr(const std::vector<Vec2>& pts) {
  std::string s;
  for (const auto& p : pts) {
    if (!s.empty()) s += ' ';
    s += px(p.x()) + "," + px(p.y());
  }
  return s;
}

}  // namespace

std::string format_number(std::optional<double> value) {
  if (!value) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, *value);
  return std::string(buf, res.ptr);
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) {
    out += r.scenario + "," + r.variant + "," + r.status + "," + format_number(r.planning_time_s) + "," +
           format_number(r.path_length_rad) + "," + format_number(r.discrete_rate) + "," +
           format_number(r.continuous_rate) + "," + format_flag(r.satisfied_discrete) + "," +
           format_flag(r.satisfied_continuous) + "," + format_number(r.risk_reduction) + "\n";
  }
  return out;
}

std::string risks_csv(const PlanResult& plan) {
  std::string out = std::string(kRisksHeader) + "\n";
  for (std::size_t i = 0; i < plan.risks.size(); ++i) {
    const double allocated = i < plan.allocation.bounds.size() ? plan.allocation.bounds[i] : 0.0;
    const double hit_in = i < plan.hit_in_distances.size() ? plan.hit_in_distances[i] : 0.0;
    out += std::to_string(i) + "," + format_number(plan.risks[i]) + "," + format_number(allocated) + "," +
           format_number(hit_in) + "\n";
  }
  return out;
}

std::string trajectory_svg(const Scenario& scenario, const NominalTrajectory& traj,
                           const std::vector<GaussianBelief>& beliefs, const std::string& title) {
  const ArmSpec& arm = scenario.arm();
  const double reach = arm.reach();
  const double half = reach * 1.15 + 0.1;
  const Vec2 lo = arm.base - Vec2(half, half);
  const Vec2 hi = arm.base + Vec2(half, half);
  constexpr double kCanvas = 640.0;
  const double scale = kCanvas / (hi.x() - lo.x());
  const double stroke = 1.5 / scale;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" "
         "\"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kCanvas
      << "\" height=\"" << kCanvas + 30 << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas + 30 << "\">\n"
      << "<title>" << escape_xml(title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kCanvas << "\" height=\"" << kCanvas + 30
      << "\" fill=\"white\"/>\n"
      << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(title)
      << "</text>\n";
  // World coordinates: y up, origin at the lower-left of the view box.
  svg << "<g transform=\"translate(0," << px(kCanvas + 30) << ") scale(" << px(scale) << ","
      << px(-scale) << ") translate(" << px(-lo.x()) << "," << px(-lo.y()) << ")\">\n";

  const std::vector<Vec2> view{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
  svg << "<g fill=\"#9aa0a6\" stroke=\"#5f6368\" stroke-width=\"" << px(stroke) << "\">\n";
  for (const auto& o : scenario.environment.obstacles) {
    if (const auto* c = std::get_if<Circle>(&o)) {
      svg << "<circle cx=\"" << px(c->center.x()) << "\" cy=\"" << px(c->center.y()) << "\" r=\""
          << px(c->radius) << "\"/>\n";
    } else if (const auto* p = std::get_if<ConvexPolygon>(&o)) {
      svg << "<polygon points=\"" << points_attr(p->vertices) << "\"/>\n";
    } else {
      const auto clipped = clip_to_half_plane(view, std::get<HalfPlane>(o));
      if (clipped.size() >= 3) svg << "<polygon points=\"" << points_attr(clipped) << "\"/>\n";
    }
  }
  svg << "</g>\n";

  auto arm_polyline = [&](const Vec& q, const char* colour, double opacity, double width) {
    const auto chain = forward_kinematics(q, arm);
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-opacity=\"" << opacity
        << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\" stroke-width=\"" << px(width)
        << "\" points=\"" << points_attr(chain.joints) << "\"/>\n";
  };
  const double link_width = std::max(2.0 * stroke, 2.0 * (arm.link_radii.empty() ? 0.0 : arm.link_radii[0]));
  svg << "<g>\n";
  for (std::size_t t = 1; t + 1 < traj.waypoints.size(); ++t) {
    arm_polyline(traj.waypoints[t].positions, "#1a73e8", 0.18, link_width);
  }
  arm_polyline(traj.waypoints.front().positions, "#188038", 0.9, link_width);
  arm_polyline(traj.waypoints.back().positions, "#d93025", 0.9, link_width);
  svg << "</g>\n";

  std::vector<Vec2> ee;
  for (const auto& w : traj.waypoints) ee.push_back(forward_kinematics(w.positions, arm).end_effector());
  svg << "<polyline fill=\"none\" stroke=\"#174ea6\" stroke-width=\"" << px(stroke) << "\" points=\""
      << points_attr(ee) << "\"/>\n";

  if (beliefs.size() == traj.waypoints.size()) {
    svg << "<g stroke=\"#e37400\" stroke-width=\"" << px(stroke) << "\">\n";
    for (std::size_t t = 0; t < beliefs.size(); ++t) {
      const auto J = jacobian(traj.waypoints[t].positions, arm);
      const Mat2 cov = J * beliefs[t].covariance * J.transpose();
      Eigen::SelfAdjointEigenSolver<Mat2> eig(0.5 * (cov + cov.transpose()));
      for (int k = 0; k < 2; ++k) {
        const double len = 3.0 * std::sqrt(std::max(0.0, eig.eigenvalues()[k]));
        if (len <= 0.0) continue;
        const Vec2 a = ee[t] - len * eig.eigenvectors().col(k);
        const Vec2 b = ee[t] + len * eig.eigenvectors().col(k);
        svg << "<line x1=\"" << px(a.x()) << "\" y1=\"" << px(a.y()) << "\" x2=\"" << px(b.x())
            << "\" y2=\"" << px(b.y()) << "\"/>\n";
      }
    }
    svg << "</g>\n";
  }
  svg << "<circle cx=\"" << px(arm.base.x()) << "\" cy=\"" << px(arm.base.y()) << "\" r=\""
      << px(4.0 * stroke) << "\" fill=\"black\"/>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace ccplan::io
