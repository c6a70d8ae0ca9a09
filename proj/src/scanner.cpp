#include "vsys/scanner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "vsys/csvio.hpp"
#include "vsys/master.hpp"
#include "vsys/version.hpp"

namespace vsys {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::array<double, 9> observables(const BlochState& s) {
  return {s.x[kRho11],   s.x[kRho22],   s.rho33(),     s.x[kReRho12], s.x[kImRho12],
          s.x[kReRho13], s.x[kImRho13], s.x[kReRho23], s.x[kImRho23]};
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
  return g;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1.0));
  return g;
}

json params_json(const SystemParams& p) {
  return json{{"gamma1", p.gamma1}, {"nu", p.nu},         {"gamma_l", p.gamma_l},
              {"eps1", p.eps1},     {"eps2", p.eps2},     {"delta1", p.delta1},
              {"delta2", p.delta2}};
}

void write_sidecar(const std::string& csv_path, const SystemParams& p,
                   const std::string& method, const json& grid_spec,
                   const std::vector<std::string>& warnings) {
  std::ifstream f(csv_path, std::ios::binary);
  const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  json meta;
  meta["tool"] = "vsys";
  meta["version"] = kVersion;
  meta["file"] = fs::path(csv_path).filename().string();
  meta["params"] = params_json(p);
  meta["method"] = method;
  meta["grid"] = grid_spec;
  meta["warnings"] = warnings;
  meta["content_sha1"] = git_blob_sha1(data);
  std::ofstream out(csv_path + ".meta.json", std::ios::binary);
  out << meta.dump(2) << "\n";
}

json grid_spec_json(const std::vector<double>& grid, const std::string& kind) {
  return json{{"kind", kind},
              {"points", grid.size()},
              {"min", grid.empty() ? 0.0 : grid.front()},
              {"max", grid.empty() ? 0.0 : grid.back()}};
}

// Parabola vertex through three samples with arbitrary spacing; falls back
// to the middle sample when the curvature is numerically zero.
void refine_extremum(double x0, double y0, double x1, double y1, double x2, double y2,
                     double& pos, double& val) {
  const double d1 = (y1 - y0) / (x1 - x0);
  const double d2 = (y2 - y1) / (x2 - x1);
  const double curv = (d2 - d1) / (x2 - x0);
  pos = x1;
  val = y1;
  if (curv == 0.0) return;
  const double v = 0.5 * (x0 + x1) - 0.5 * d1 / curv;
  if (v > x0 && v < x2) {
    pos = v;
    // evaluate the interpolating parabola at the vertex
    val = y0 + d1 * (v - x0) + curv * (v - x0) * (v - x1);
  }
}

}  // namespace

SpectrumScan scan(const SystemParams& p, const std::vector<double>& grid,
                  ScanMethod method, unsigned threads) {
  if (method == ScanMethod::Closedform && p.delta1 != 0.0)
    throw Error(Errc::WrongBranch, "closed-form scans require delta1 = 0");

  SpectrumScan out;
  out.grid = grid;
  out.rows.resize(grid.size());
  out.method = method;
  out.params = p;

  auto solve_point = [&](size_t i) {
    SystemParams q = p;
    q.delta2 = grid[i];
    try {
      if (method == ScanMethod::Numeric) {
        out.rows[i] = observables(steady_state(build_generator(q)));
      } else {
        const double r11 = rho11_closed(q, grid[i]);
        // The reduced formula predicts rho11 only; remaining observables are
        // outside its scope and left at zero, with rho33 from the trace.
        out.rows[i] = {r11, 0.0, 1.0 - r11, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
      }
    } catch (const Error& e) {
      throw Error(e.code(),
                  std::string(e.what()) + " at delta2=" + format_double(grid[i]));
    }
  };

  unsigned n = threads ? threads : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  n = static_cast<unsigned>(std::min<size_t>(n, grid.size() ? grid.size() : 1));

  if (n <= 1 || grid.size() < 2) {
    for (size_t i = 0; i < grid.size(); ++i) solve_point(i);
    return out;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= out.grid.size() || failed.load()) return;
      try {
        solve_point(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<double> default_grid(const SystemParams& p) {
  double l0_est = 0.0;
  if (p.delta1 == 0.0 && p.eps1 > 0.0 && p.nu > 0.0) {
    try {
      l0_est = ats_position(p);
    } catch (const Error&) {
      l0_est = 0.0;  // regime breakdown: fall back to the drive scales
    }
  }
  const double span =
      3.0 * std::max({l0_est, p.gamma1, p.eps1, std::abs(p.delta1)});
  std::vector<double> grid = linspace(-span, span, 400);

  if (p.delta1 == 0.0 && p.nu > 0.0 && p.eps2 > 0.0 && p.eps1 > 0.0) {
    const LambdaPair lp = lambdas(p);
    if (lp.regime.tag == RegimeTag::Cic) {
      // Line-center structure spans scales from w_broad down to the
      // pedestal edge; a log sub-grid resolves all of them at once.
      const CicDecomposition d = cic_decomposition(p);
      const double hi = 10.0 * d.w_narrow;
      const double lo = hi * 1e-4;
      const auto sub = logspace(lo, hi, 100);
      grid.push_back(0.0);
      for (double x : sub) {
        grid.push_back(x);
        grid.push_back(-x);
      }
      std::sort(grid.begin(), grid.end());
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
  }
  return grid;
}

PeakReport find_peaks(const SpectrumScan& s, int column) {
  const size_t n = s.grid.size();
  if (n < 5) throw Error(Errc::InvalidParameter, "find_peaks requires at least 5 grid points");
  if (column < 0 || column >= static_cast<int>(kScanColumns.size()))
    throw Error(Errc::InvalidParameter, "bad scan column index");

  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = s.rows[i][column];

  PeakReport report;
  report.baseline = 0.25 * (v[0] + v[1] + v[n - 2] + v[n - 1]);

  for (size_t i = 1; i + 1 < n; ++i) {
    const bool is_max = v[i] > v[i - 1] && v[i] > v[i + 1];
    const bool is_min = v[i] < v[i - 1] && v[i] < v[i + 1];
    if (!is_max && !is_min) continue;

    Peak peak;
    peak.is_maximum = is_max;
    refine_extremum(s.grid[i - 1], v[i - 1], s.grid[i], v[i], s.grid[i + 1], v[i + 1],
                    peak.position, peak.height);

    // Half-excursion crossings relative to the scan baseline.
    const double half = report.baseline + 0.5 * (peak.height - report.baseline);
    auto inside = [&](size_t k) { return is_max ? v[k] > half : v[k] < half; };
    double left = std::nan(""), right = std::nan("");
    for (size_t k = i; k-- > 0;) {
      if (!inside(k)) {
        left = s.grid[k] +
               (s.grid[k + 1] - s.grid[k]) * (half - v[k]) / (v[k + 1] - v[k]);
        break;
      }
    }
    for (size_t k = i + 1; k < n; ++k) {
      if (!inside(k)) {
        right = s.grid[k - 1] +
                (s.grid[k] - s.grid[k - 1]) * (half - v[k - 1]) / (v[k] - v[k - 1]);
        break;
      }
    }
    if (std::isnan(left) && std::isnan(right)) {
      peak.fwhm = s.grid[n - 1] - s.grid[0];  // unresolved: whole scan window
    } else if (std::isnan(left)) {
      peak.fwhm = 2.0 * (right - peak.position);
    } else if (std::isnan(right)) {
      peak.fwhm = 2.0 * (peak.position - left);
    } else {
      peak.fwhm = right - left;
    }
    report.peaks.push_back(peak);
  }

  if (report.peaks.empty())
    throw Error(Errc::NoPeaks, "scan is monotone; no local extrema found");
  return report;
}

RegimeReport regime_report(const SystemParams& p) {
  RegimeReport r;
  r.eps2_c = critical_eps2(p);
  r.eps2_c_strong = critical_eps2_strong(p);
  r.hierarchy_warnings = check_limit_hierarchy(p);

  if (p.delta1 == 0.0) {
    r.lambda = lambdas(p);
    r.tag = r.lambda->regime.tag;
  } else {
    // Off-resonant pump: classify from the pole structure. The line-center
    // (CIC) signature is the broad resonance staying pinned near the
    // imaginary axis while the sharp one follows the two-photon condition;
    // in the split (ATS) regime both poles sit at the dressed-state
    // positions, well away from the axis.
    r.poles = physical_poles(p);
    bool near_axis = false;
    for (const auto& pl : r.poles->physical())
      if (std::abs(pl.location.real()) <= 0.1 * p.gamma1) near_axis = true;
    r.tag = near_axis ? RegimeTag::Cic : RegimeTag::Ats;
  }
  return r;
}

namespace {

SystemParams indium_defaults() {
  SystemParams p;
  p.gamma1 = 1.0;
  p.nu = 2.28e-6;
  p.gamma_l = 1e-4;
  return p;
}

SystemParams apply(const SystemParams& base, const ParamOverrides& o) {
  SystemParams p = base;
  if (o.nu) p.nu = *o.nu;
  if (o.gamma_l) p.gamma_l = *o.gamma_l;
  if (o.eps1) p.eps1 = *o.eps1;
  if (o.eps2) p.eps2 = *o.eps2;
  if (o.delta1) p.delta1 = *o.delta1;
  return p;
}

std::string write_scan_csv(const fs::path& path, const SpectrumScan& s) {
  CsvTable t;
  t.header.push_back("delta2");
  for (const char* c : kScanColumns) t.header.push_back(c);
  for (size_t i = 0; i < s.grid.size(); ++i) {
    std::vector<double> row;
    row.push_back(s.grid[i]);
    row.insert(row.end(), s.rows[i].begin(), s.rows[i].end());
    t.rows.push_back(std::move(row));
  }
  write_csv(path.string(), t);
  write_sidecar(path.string(), s.params, to_string(s.method),
                grid_spec_json(s.grid, "delta2"),
                check_limit_hierarchy(s.params));
  return path.string();
}

std::string write_trajectory_csv(const fs::path& path, const SystemParams& p,
                                 const std::string& sweep_name, const TrackResult& tr,
                                 const std::vector<double>& grid) {
  CsvTable t;
  t.header = {sweep_name};
  for (int k = 1; k <= 4; ++k) {
    t.header.push_back("re_pole_" + std::to_string(k));
    t.header.push_back("im_pole_" + std::to_string(k));
    t.header.push_back("re_residue_" + std::to_string(k));
    t.header.push_back("im_residue_" + std::to_string(k));
  }
  for (size_t i = 0; i < tr.sets.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (const auto& pl : tr.sets[i].poles) {
      if (pl.cancelled) {
        for (int j = 0; j < 4; ++j) row.push_back(std::nan(""));
      } else {
        row.push_back(pl.location.real());
        row.push_back(pl.location.imag());
        row.push_back(pl.residue.real());
        row.push_back(pl.residue.imag());
      }
    }
    t.rows.push_back(std::move(row));
  }
  write_csv(path.string(), t);
  write_sidecar(path.string(), p, "poleatlas", grid_spec_json(grid, sweep_name), tr.warnings);
  return path.string();
}

}  // namespace

std::vector<std::string> figure(const std::string& name, const ParamOverrides& overrides,
                                const std::string& outdir, unsigned threads) {
  const fs::path dir(outdir);
  fs::create_directories(dir);
  std::vector<std::string> written;

  SystemParams base = indium_defaults();

  if (name == "1b" || name == "1c" || name == "4" || name == "5a" || name == "5b") {
    SystemParams p = base;
    if (name == "1b") {
      p.eps1 = 2.0;
      p.eps2 = 0.002;  // well below the border: split-resonance regime
    } else if (name == "1c") {
      p.eps1 = 2.0;
      p.eps2 = 0.1;  // well above the border: line-center coherence regime
    } else if (name == "4") {
      p.eps1 = 0.8;
      p.eps2 = 0.2;
    } else if (name == "5a") {
      p.eps1 = 10.0;
      p.eps2 = 1e-3;
      p.delta1 = 7.0;
    } else {
      p.eps1 = 0.8;
      p.eps2 = 0.2;
      p.delta1 = 7.0;
    }
    p = apply(p, overrides);
    const SpectrumScan s = scan(p, default_grid(p), ScanMethod::Numeric, threads);
    written.push_back(write_scan_csv(dir / ("fig" + name + ".csv"), s));
  } else if (name == "1d") {
    // Population sheet over (eps1, delta2) at fixed clock drive. The eps1
    // range and normalization are a choice of this tool: raw rho11 over
    // eps1 in [0.1, 5].
    SystemParams p = base;
    p.eps2 = 0.1;
    p = apply(p, overrides);
    const auto eps1_grid = linspace(0.1, 5.0, 100);
    const auto d2_grid = linspace(-15.0, 15.0, 100);
    CsvTable t;
    t.header = {"eps1", "delta2", "rho11"};
    for (double e1 : eps1_grid) {
      SystemParams q = p;
      q.eps1 = e1;
      const SpectrumScan s = scan(q, d2_grid, ScanMethod::Numeric, threads);
      for (size_t i = 0; i < d2_grid.size(); ++i)
        t.rows.push_back({e1, d2_grid[i], s.rows[i][0]});
    }
    const fs::path path = dir / "fig1d.csv";
    write_csv(path.string(), t);
    write_sidecar(path.string(), p, "numeric",
                  json{{"kind", "eps1 x delta2"},
                       {"eps1_points", eps1_grid.size()},
                       {"delta2_points", d2_grid.size()},
                       {"eps1_min", 0.1},
                       {"eps1_max", 5.0},
                       {"delta2_min", -15.0},
                       {"delta2_max", 15.0}},
                  check_limit_hierarchy(p));
    written.push_back(path.string());
  } else if (name == "2") {
    SystemParams p = base;
    p.eps1 = 2.0;
    p = apply(p, overrides);
    const double ec = critical_eps2(p);
    const auto grid = logspace(ec / 10.0, 10.0 * ec, 200);
    CsvTable re, im;
    re.header = {"eps2", "re_lambda1", "re_lambda2"};
    im.header = {"eps2", "im_lambda1", "im_lambda2"};
    for (double e2 : grid) {
      SystemParams q = p;
      q.eps2 = e2;
      const LambdaPair lp = lambdas(q);
      re.rows.push_back({e2, lp.lambda1.real(), lp.lambda2.real()});
      im.rows.push_back({e2, lp.lambda1.imag(), lp.lambda2.imag()});
    }
    const fs::path re_path = dir / "re_lambda.csv";
    const fs::path im_path = dir / "im_lambda.csv";
    write_csv(re_path.string(), re);
    write_sidecar(re_path.string(), p, "closedform", grid_spec_json(grid, "eps2"), {});
    written.push_back(re_path.string());
    write_csv(im_path.string(), im);
    write_sidecar(im_path.string(), p, "closedform", grid_spec_json(grid, "eps2"), {});
    written.push_back(im_path.string());
  } else if (name == "3") {
    SystemParams p = base;
    p = apply(p, overrides);
    const auto grid = logspace(0.1, 10.0, 100);
    CsvTable t;
    t.header = {"eps1", "eps2_c", "eps2_c_strong"};
    for (double e1 : grid) {
      SystemParams q = p;
      q.eps1 = e1;
      t.rows.push_back({e1, critical_eps2(q), critical_eps2_strong(q)});
    }
    const fs::path path = dir / "fig3.csv";
    write_csv(path.string(), t);
    write_sidecar(path.string(), p, "closedform", grid_spec_json(grid, "eps1"), {});
    written.push_back(path.string());
  } else if (name == "6a" || name == "6b") {
    SystemParams p = base;
    if (name == "6a") {
      p.eps1 = 10.0;
      p.eps2 = 1e-3;
    } else {
      p.eps1 = 0.8;
      p.eps2 = 0.2;
    }
    p = apply(p, overrides);
    SweepSpec sweep;
    sweep.variable = SweepSpec::Variable::Delta1;
    sweep.grid = linspace(-7.0, 7.0, 100);
    const TrackResult tr = track(p, sweep);
    written.push_back(
        write_trajectory_csv(dir / ("fig" + name + ".csv"), p, "delta1", tr, sweep.grid));
  } else {
    throw Error(Errc::UnknownFigure, "unknown figure: " + name);
  }
  return written;
}

}  // namespace vsys
