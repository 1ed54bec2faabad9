#ifndef SSIE2D_CLI_HPP
#define SSIE2D_CLI_HPP

// Batch commands behind the ssie2d executable. Each command reads a scene
// config, writes its CSV files and summary.json into the output directory and
// returns the summary.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssie2d/config.hpp"
#include "ssie2d/geometry.hpp"
#include "ssie2d/postproc.hpp"
#include "ssie2d/reference.hpp"
#include "ssie2d/solver.hpp"

namespace ssie2d::cli {

struct Range {
  double start = 0.0;
  double end = 0.0;
  int n = 0;
};

struct Options {
  std::string command;
  std::string config;
  bool compare_pmchwt = false;
  Range angles{0.0, 360.0, 361};
  std::optional<double> fstart, fend;
  std::optional<int> npoints;
  std::vector<double> acspw_list{5, 8, 10, 12, 15, 20};
  std::string reference = "pmchwt";
  std::optional<Range> nearfield;  // square grid [start, end]^2 with n x n points
  std::string out = ".";
};

struct RunSummary {
  std::string scene_digest;
  std::string command;
  int n_unknowns_ssie = 0;
  std::optional<int> n_unknowns_pmchwt;
  double cond_final = 0.0;
  std::optional<double> cond_pmchwt;
  double acspw = 0.0;
  double wall_time_s = 0.0;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["scene_digest"] = scene_digest;
    j["command"] = command;
    j["n_unknowns_ssie"] = n_unknowns_ssie;
    if (n_unknowns_pmchwt) j["n_unknowns_pmchwt"] = *n_unknowns_pmchwt;
    j["cond_final"] = cond_final;
    if (cond_pmchwt) j["cond_pmchwt"] = *cond_pmchwt;
    j["acspw"] = acspw;
    j["wall_time_s"] = wall_time_s;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
  }
};

// Scientific notation, 12 significant digits.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

inline Range parse_range(const std::string& s, const std::string& flag) {
  Range r;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &r.start, &r.end, &r.n, &tail) != 3)
    throw ValidationError("expected START:END:N, got '" + s + "'", flag);
  if (r.n < 1) throw ValidationError("N must be >= 1", flag);
  if (r.n > 1 && !(r.end > r.start)) throw ValidationError("END must exceed START", flag);
  return r;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("not a number: '" + item + "'", flag);
    }
    if (used != item.size()) throw ValidationError("not a number: '" + item + "'", flag);
    out.push_back(v);
  }
  return out;
}

inline std::vector<double> range_values(const Range& r) { return linspace(r.start, r.end, std::size_t(r.n)); }

namespace detail {

struct Loaded {
  SceneConfig cfg;
  Excitation exc;
};

inline Loaded load(const Options& o) {
  const auto j = read_json_file(o.config);
  return {parse_scene_config(j), parse_excitation(j)};
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& p, const std::string& header) : out_(p) {
    if (!out_) throw Error("cannot write " + p.string());
    out_ << header << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

inline void write_summary(const Options& o, const RunSummary& s) {
  std::ofstream f(std::filesystem::path(o.out) / "summary.json");
  if (!f) throw Error("cannot write summary.json in " + o.out);
  f << s.to_json().dump(2) << '\n';
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double amplitude(const Excitation& exc) { return std::abs(exc.amplitude); }

// Radius of a scene that is one full circle, for the series oracle.
inline std::optional<double> circle_radius(const SceneConfig& cfg) {
  if (cfg.objects.size() != 1 || !cfg.shared.empty() || cfg.objects[0].contour.size() != 1) return std::nullopt;
  const auto& p = cfg.objects[0].contour[0];
  if (p.kind != Primitive::Kind::Arc || std::abs(p.angle_end_deg - p.angle_start_deg - 360.0) > 1e-9)
    return std::nullopt;
  return p.radius;
}

inline std::vector<Vec2> grid(const Range& r) {
  std::vector<Vec2> pts;
  const auto v = range_values(r);
  for (double y : v)
    for (double x : v) pts.push_back({x, y});
  return pts;
}

}  // namespace detail

inline RunSummary cmd_solve(const Options& o, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = detail::load(o);
  const Scene scene = build_scene(in.cfg);
  const auto s = solve_scene(scene, in.exc);
  const auto phi_deg = range_values(o.angles);
  const auto phi = angles_deg_to_rad(phi_deg);
  const double amp = detail::amplitude(in.exc);
  const auto rcs = bistatic_rcs(s.out.J_outer, s.outer_segments, scene.background, scene.omega(), phi, amp);

  RunSummary sum;
  sum.command = "solve";
  sum.scene_digest = s.out.scene_digest;
  sum.n_unknowns_ssie = int(s.out.E_outer.size());
  sum.cond_final = s.out.cond_final;
  sum.acspw = acspw(scene);

  std::optional<PmchwtSolution> pm;
  std::vector<double> ref;
  if (o.compare_pmchwt) {
    pm = pmchwt_solve(scene, in.exc);
    sum.n_unknowns_pmchwt = pm->n_unknowns;
    sum.cond_pmchwt = pm->cond_system;
    RcsCurve rc = rcs;
    rc.sigma = ref = pmchwt_rcs(*pm, scene, phi, amp);
    sum.extra["re_pmchwt"] = relative_error_rcs(rcs, rc);
  }

  {
    detail::CsvFile f(std::filesystem::path(o.out) / "rcs_bistatic.csv",
                      pm ? "angle_deg,sigma_m,sigma_db,sigma_pmchwt_m" : "angle_deg,sigma_m,sigma_db");
    for (std::size_t i = 0; i < phi.size(); ++i) {
      std::vector<std::string> row{fmt(phi_deg[i]), fmt(rcs.sigma[i]), fmt(RcsCurve::to_db(rcs.sigma[i]))};
      if (pm) row.push_back(fmt(ref[i]));
      f.row(row);
    }
  }

  if (o.nearfield) {
    const auto pts = detail::grid(*o.nearfield);
    const auto nf = near_field(s.out.J_outer, s.outer_segments, scene.background, scene.omega(), in.exc, pts);
    std::optional<NearField> nr;
    std::vector<double> err;
    if (pm) {
      nr = pmchwt_near_field(*pm, scene, in.exc, pts);
      err = near_field_relative_error(nf.E, nr->E);
      sum.extra["nearfield_median_rel_err"] = finite_median(err);
    }
    detail::CsvFile f(std::filesystem::path(o.out) / "nearfield.csv",
                      pm ? "x,y,re_E,im_E,abs_E,re_E_pmchwt,im_E_pmchwt,rel_err" : "x,y,re_E,im_E,abs_E");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (nf.flagged[i]) continue;
      const cplx e = nf.E(Eigen::Index(i));
      std::vector<std::string> row{fmt(pts[i].x), fmt(pts[i].y), fmt(e.real()), fmt(e.imag()), fmt(std::abs(e))};
      if (nr) {
        const cplx r = nr->E(Eigen::Index(i));
        row.insert(row.end(), {fmt(r.real()), fmt(r.imag()), fmt(err[i])});
      }
      f.row(row);
    }
    sum.extra["nearfield_points"] = pts.size() - nf.n_flagged();
    sum.extra["nearfield_flagged"] = nf.n_flagged();
  }
  log << "solve: " << sum.n_unknowns_ssie << " unknowns, cond " << fmt(sum.cond_final) << '\n';
  sum.wall_time_s = detail::seconds_since(t0);
  detail::write_summary(o, sum);
  return sum;
}

inline RunSummary cmd_sweep(const Options& o, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!o.fstart) throw ValidationError("required for sweep", "--fstart");
  if (!o.fend) throw ValidationError("required for sweep", "--fend");
  if (!o.npoints) throw ValidationError("required for sweep", "--npoints");
  if (*o.npoints < 2) throw ValidationError("need at least 2 frequencies", "--npoints");
  if (!(*o.fstart > 0.0) || !(*o.fend > *o.fstart)) throw ValidationError("need 0 < fstart < fend", "--fstart");
  const auto in = detail::load(o);

  double cond_max = 0.0;
  const BackscatterFn ssie = [&](const Scene& sc, const Excitation& exc) {
    const auto s = solve_scene(sc, exc);
    cond_max = std::max(cond_max, s.out.cond_final);
    const double back = exc.direction_angle() + kPi;
    return echo_width(s.outer_segments, s.out.J_outer, nullptr, sc.background, sc.omega(),
                      std::span<const double>(&back, 1), detail::amplitude(exc))[0];
  };
  const auto c = monostatic_sweep(in.cfg, *o.fstart, *o.fend, std::size_t(*o.npoints), in.exc, ssie);
  std::optional<RcsCurve> ref;
  if (o.compare_pmchwt) ref = monostatic_sweep(in.cfg, *o.fstart, *o.fend, std::size_t(*o.npoints), in.exc,
                                               pmchwt_backscatter);

  int failed = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.ok(i)) {
      ++failed;
      log << "sweep: " << fmt(c.frequencies[i]) << " Hz failed: " << c.errors[i] << '\n';
    }
    if (ref && !ref->ok(i)) log << "sweep: reference at " << fmt(c.frequencies[i]) << " Hz failed: " << ref->errors[i] << '\n';
  }
  {
    detail::CsvFile f(std::filesystem::path(o.out) / "rcs_monostatic.csv",
                      ref ? "freq_hz,sigma_m,sigma_db,sigma_pmchwt_m" : "freq_hz,sigma_m,sigma_db");
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::vector<std::string> row{fmt(c.frequencies[i]), fmt(c.sigma[i]), fmt(RcsCurve::to_db(c.sigma[i]))};
      if (ref) row.push_back(fmt(ref->sigma[i]));
      f.row(row);
    }
  }

  const Scene top = build_scene(with_frequency(in.cfg, *o.fend));
  RunSummary sum;
  sum.command = "sweep";
  sum.scene_digest = scene_digest(build_scene(in.cfg));
  sum.n_unknowns_ssie = int(top.segment_count(top.outer_pieces()));
  sum.cond_final = cond_max;
  sum.acspw = acspw(top);
  sum.extra["n_frequencies"] = c.size();
  sum.extra["n_failed"] = failed;
  if (ref) {
    sum.n_unknowns_pmchwt = int(2 * top.total_segments());
    sum.extra["re_pmchwt"] = relative_error_rcs(c, *ref);
    int within = 0, compared = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c.ok(i) || !ref->ok(i)) continue;
      ++compared;
      within += std::abs(c.sigma[i] - ref->sigma[i]) < 0.03 * std::abs(ref->sigma[i]);
    }
    sum.extra["fraction_within_3pct"] = compared ? double(within) / compared : 0.0;
  }
  sum.wall_time_s = detail::seconds_since(t0);
  detail::write_summary(o, sum);
  return sum;
}

inline RunSummary cmd_converge(const Options& o, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  if (o.acspw_list.size() < 2) throw ValidationError("need at least 2 values", "--acspw-list");
  for (double a : o.acspw_list)
    if (!(a > 0.0)) throw ValidationError("values must be > 0", "--acspw-list");
  if (o.reference != "pmchwt" && o.reference != "series")
    throw ValidationError("expected pmchwt or series", "--reference");
  const auto in = detail::load(o);
  const auto radius = detail::circle_radius(in.cfg);
  if (o.reference == "series" && !radius)
    throw ValidationError("the series reference covers only a single homogeneous circular object", "--reference");

  const double lambda = kSpeedOfLight / in.cfg.frequency_hz;
  const auto phi_deg = range_values(o.angles);
  const auto phi = angles_deg_to_rad(phi_deg);
  const double amp = detail::amplitude(in.exc);
  const double amax = *std::max_element(o.acspw_list.begin(), o.acspw_list.end());

  RunSummary sum;
  sum.command = "converge";
  RcsCurve ref;
  ref.angles = phi;
  ref.frequencies = {in.cfg.frequency_hz};
  if (o.reference == "series") {
    ref.sigma = mie_cylinder_rcs(*radius, in.cfg.objects[0].medium, in.cfg.background, in.cfg.frequency_hz, phi);
  } else {
    SceneConfig fine = in.cfg;
    fine.h_target_m = lambda / (3.0 * amax);
    const Scene sc = build_scene(fine);
    const auto pm = pmchwt_solve(sc, in.exc, false);
    ref.sigma = pmchwt_rcs(pm, sc, phi, amp);
    sum.n_unknowns_pmchwt = pm.n_unknowns;
    sum.extra["reference_acspw"] = acspw(sc);
  }
  sum.extra["reference"] = o.reference;

  detail::CsvFile f(std::filesystem::path(o.out) / "convergence.csv", "acspw,re,acspw_actual,n_unknowns");
  nlohmann::json rows = nlohmann::json::array();
  for (double a : o.acspw_list) {
    SceneConfig cfg = in.cfg;
    cfg.h_target_m = lambda / a;
    const Scene sc = build_scene(cfg);
    const auto s = solve_scene(sc, in.exc);
    const auto c = bistatic_rcs(s.out.J_outer, s.outer_segments, sc.background, sc.omega(), phi, amp);
    const double re = relative_error_rcs(c, ref);
    f.row({fmt(a), fmt(re), fmt(acspw(sc)), std::to_string(s.out.E_outer.size())});
    log << "converge: ACSPW " << a << " RE " << fmt(re) << '\n';
    if (a == amax) {
      sum.scene_digest = s.out.scene_digest;
      sum.n_unknowns_ssie = int(s.out.E_outer.size());
      sum.cond_final = s.out.cond_final;
      sum.acspw = acspw(sc);
    }
  }
  sum.wall_time_s = detail::seconds_since(t0);
  detail::write_summary(o, sum);
  return sum;
}

inline RunSummary cmd_cond(const Options& o, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = detail::load(o);
  const Scene scene = build_scene(in.cfg);
  const auto s = solve_scene(scene, in.exc, true);
  const auto pm = pmchwt_solve(scene, in.exc);
  CondLog rows = s.cond;
  rows.push_back({"PMCHWT system", Eigen::Index(pm.n_unknowns), pm.cond_system});
  {
    detail::CsvFile f(std::filesystem::path(o.out) / "cond_report.csv", "matrix,size,cond2");
    for (const auto& r : rows) f.row({r.name, std::to_string(r.size), fmt(r.cond)});
  }
  RunSummary sum;
  sum.command = "cond";
  sum.scene_digest = s.out.scene_digest;
  sum.n_unknowns_ssie = int(s.out.E_outer.size());
  sum.n_unknowns_pmchwt = pm.n_unknowns;
  sum.cond_final = s.out.cond_final;
  sum.cond_pmchwt = pm.cond_system;
  sum.acspw = acspw(scene);
  sum.extra["cond_ratio"] = pm.cond_system / s.out.cond_final;
  log << "cond: final " << fmt(sum.cond_final) << ", two-current " << fmt(pm.cond_system) << '\n';
  sum.wall_time_s = detail::seconds_since(t0);
  detail::write_summary(o, sum);
  return sum;
}

inline RunSummary run(const Options& o, std::ostream& log) {
  if (o.config.empty()) throw ValidationError("required", "--config");
  std::filesystem::create_directories(o.out);
  if (o.command == "solve") return cmd_solve(o, log);
  if (o.command == "sweep") return cmd_sweep(o, log);
  if (o.command == "converge") return cmd_converge(o, log);
  if (o.command == "cond") return cmd_cond(o, log);
  throw ValidationError("unknown command '" + o.command + "'", "command");
}

}  // namespace ssie2d::cli

#endif  // SSIE2D_CLI_HPP
