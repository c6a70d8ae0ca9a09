// Command-line front end: steady states, spectrum scans, peak and pole
// reports, regime classification, and stock figure reproduction for the
// driven three-level V-system.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "vsys/csvio.hpp"
#include "vsys/master.hpp"
#include "vsys/scanner.hpp"
#include "vsys/version.hpp"

namespace {

using nlohmann::json;
using namespace vsys;

struct ParamArgs {
  std::optional<double> gamma1, nu, gamma_l, eps1, eps2, delta1, delta2;
  std::string params_file;
  std::string units = "gamma1";
  unsigned threads = 0;
};

void add_param_options(CLI::App* cmd, ParamArgs& a) {
  cmd->add_option("--params", a.params_file, "JSON parameter file");
  cmd->add_option("--units", a.units, "input convention: gamma1 (default) or hz")
      ->check(CLI::IsMember({"gamma1", "hz"}));
  cmd->add_option("--gamma1", a.gamma1, "half decay rate of the fast state (the unit)");
  cmd->add_option("--nu", a.nu, "half decay rate of the metastable state");
  cmd->add_option("--gamma_l", a.gamma_l, "clock laser linewidth");
  cmd->add_option("--eps1", a.eps1, "cooling laser Rabi frequency");
  cmd->add_option("--eps2", a.eps2, "clock laser Rabi frequency");
  cmd->add_option("--delta1", a.delta1, "cooling laser detuning");
  cmd->add_option("--delta2", a.delta2, "clock laser detuning");
  cmd->add_option("--threads", a.threads, "worker threads (0 = hardware)");
}

// Resolve file + flags (flags win) into normalized parameters. Values are
// divided by gamma1, so both unit conventions share one code path; defaults
// nu = 2.28e-6, gamma_l = 1e-4 are in gamma1 units.
SystemParams resolve_params(const ParamArgs& a) {
  std::optional<double> gamma1 = a.gamma1, nu = a.nu, gamma_l = a.gamma_l;
  std::optional<double> eps1 = a.eps1, eps2 = a.eps2, delta1 = a.delta1, delta2 = a.delta2;
  bool hz = a.units == "hz";

  if (!a.params_file.empty()) {
    std::ifstream f(a.params_file);
    if (!f) throw Error(Errc::BadInput, "cannot open parameter file: " + a.params_file);
    json j;
    try {
      f >> j;
    } catch (const json::exception& e) {
      throw Error(Errc::BadInput, std::string("bad parameter file: ") + e.what());
    }
    for (auto& [key, value] : j.items()) {
      const double v = value.get<double>();
      if (key == "gamma1_hz") {
        hz = true;
        if (!gamma1) gamma1 = v;
      } else if (key == "gamma1") {
        if (!gamma1) gamma1 = v;
      } else if (key == "nu") {
        if (!nu) nu = v;
      } else if (key == "gamma_l") {
        if (!gamma_l) gamma_l = v;
      } else if (key == "eps1") {
        if (!eps1) eps1 = v;
      } else if (key == "eps2") {
        if (!eps2) eps2 = v;
      } else if (key == "delta1") {
        if (!delta1) delta1 = v;
      } else if (key == "delta2") {
        if (!delta2) delta2 = v;
      } else {
        throw Error(Errc::BadInput, "unknown parameter key: " + key);
      }
    }
  }
  if (hz && !gamma1)
    throw Error(Errc::BadInput, "hz units require gamma1 (or gamma1_hz in the file)");

  const double g = gamma1.value_or(1.0);
  SystemParams raw;
  raw.gamma1 = g;
  raw.nu = nu.value_or(2.28e-6 * g);
  raw.gamma_l = gamma_l.value_or(1e-4 * g);
  raw.eps1 = eps1.value_or(0.0);
  raw.eps2 = eps2.value_or(0.0);
  raw.delta1 = delta1.value_or(0.0);
  raw.delta2 = delta2.value_or(0.0);
  return normalize(raw);
}

json params_json(const SystemParams& p) {
  return json{{"gamma1", p.gamma1}, {"nu", p.nu},         {"gamma_l", p.gamma_l},
              {"eps1", p.eps1},     {"eps2", p.eps2},     {"delta1", p.delta1},
              {"delta2", p.delta2}};
}

void emit(const json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) throw Error(Errc::BadInput, "cannot open for writing: " + output);
    f << j.dump(2) << "\n";
  }
}

std::vector<double> make_grid(double from, double to, int points, bool log_spaced) {
  if (points < 2 || to <= from)
    throw Error(Errc::InvalidParameter, "grid needs points >= 2 and to > from");
  std::vector<double> g(points);
  if (log_spaced) {
    if (from <= 0.0) throw Error(Errc::InvalidParameter, "log grid requires from > 0");
    for (int i = 0; i < points; ++i)
      g[i] = from * std::pow(to / from, i / (points - 1.0));
  } else {
    for (int i = 0; i < points; ++i) g[i] = from + (to - from) * i / (points - 1.0);
  }
  return g;
}

int column_index(const std::string& name) {
  for (size_t i = 0; i < kScanColumns.size(); ++i)
    if (name == kScanColumns[i]) return static_cast<int>(i);
  throw Error(Errc::InvalidParameter, "unknown scan column: " + name);
}

json peaks_json(const PeakReport& r) {
  json out;
  out["baseline"] = r.baseline;
  out["peaks"] = json::array();
  for (const auto& pk : r.peaks) {
    out["peaks"].push_back({{"position", pk.position},
                            {"height", pk.height},
                            {"fwhm", pk.fwhm},
                            {"orientation", pk.is_maximum ? "maximum" : "minimum"}});
  }
  return out;
}

json poles_json(const PoleSet& set) {
  json out;
  out["denom_coeffs"] = set.denom_coeffs;
  out["poles"] = json::array();
  for (const auto& pl : set.poles) {
    out["poles"].push_back({{"re", pl.location.real()},
                            {"im", pl.location.imag()},
                            {"residue_re", pl.residue.real()},
                            {"residue_im", pl.residue.imag()},
                            {"cancelled", pl.cancelled}});
  }
  return out;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "ok   - " : "FAIL - ") << name << "\n";
    if (!ok) ++failures;
  };

  // Two-level closure: with the clock laser off the fast transition
  // saturates to eps1^2/(2 eps1^2 + gamma1^2 + delta1^2).
  {
    SystemParams p;
    p.nu = 1e-3;
    p.eps1 = 1.7;
    p.delta1 = 0.9;
    const BlochState s = steady_state(build_generator(p));
    const double expect = p.eps1 * p.eps1 / (2 * p.eps1 * p.eps1 + 1 + p.delta1 * p.delta1);
    check(std::abs(s.rho11() - expect) < 1e-10, "two-level saturation closure");
  }
  // Reconstructed matrix is Hermitian with unit trace.
  {
    BlochState s;
    s.x << 0.25, 0.25, 0.1, -0.1, 0.02, 0.01, -0.03, 0.04;
    const Eigen::Matrix3cd rho = reconstruct(s);
    check((rho - rho.adjoint()).norm() == 0.0 && std::abs(rho.trace().real() - 1.0) == 0.0,
          "density matrix reconstruction");
  }
  // Resonant-pump scans are symmetric in delta2.
  {
    SystemParams p;
    p.nu = 1e-3;
    p.gamma_l = 1e-2;
    p.eps1 = 2.0;
    p.eps2 = 0.1;
    const auto grid = make_grid(-5.0, 5.0, 81, false);
    const SpectrumScan s = scan(p, grid, ScanMethod::Numeric, 1);
    double worst = 0.0;
    for (size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(s.rows[i][0] - s.rows[grid.size() - 1 - i][0]));
    check(worst < 1e-12, "resonant-pump scan symmetry");
  }
  // Closed form tracks the numeric solver when the rate hierarchy holds.
  {
    SystemParams p;
    p.nu = 1e-6;
    p.gamma_l = 1e-4;
    p.eps1 = 2.0;
    p.eps2 = 0.01;
    double worst = 0.0;
    for (double d2 : make_grid(-8.0, 8.0, 101, false)) {
      SystemParams q = p;
      q.delta2 = d2;
      const double num = steady_state(build_generator(q)).rho11();
      worst = std::max(worst, std::abs(rho11_closed(q, d2) - num) / num);
    }
    check(worst < 0.02, "closed form vs numeric steady state");
  }
  // The regime border from the printed formula matches a sign bisection.
  {
    SystemParams p;
    p.nu = 1e-5;
    p.eps1 = 2.0;
    const double ec = critical_eps2(p);
    double lo = 0.5 * ec, hi = 2.0 * ec;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      SystemParams q = p;
      q.eps2 = mid;
      (ab(q).b_squared < 0 ? lo : hi) = mid;
    }
    check(std::abs(0.5 * (lo + hi) - ec) / ec < 1e-9, "critical clock power bisection");
  }
  // CSV round-trip is byte identical.
  {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{1.0 / 3.0, -2.718281828459045e-7}, {5e300, 0.0}};
    const std::string once = to_csv(t);
    const auto tmp = std::filesystem::temp_directory_path() / "vsys_selftest.csv";
    write_csv(tmp.string(), t);
    const std::string twice = to_csv(read_csv(tmp.string()));
    std::filesystem::remove(tmp);
    check(once == twice, "CSV round-trip");
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady-state spectra of a driven three-level V-system"};
  app.set_version_flag("--version", std::string("vsys ") + kVersion);
  app.require_subcommand(1);

  ParamArgs args;

  auto* cmd_steady = app.add_subcommand("steady", "solve one steady state");
  add_param_options(cmd_steady, args);
  std::string steady_output;
  cmd_steady->add_option("--output", steady_output, "write JSON here instead of stdout");

  auto* cmd_scan = app.add_subcommand("scan", "spectrum over a delta2 grid");
  add_param_options(cmd_scan, args);
  struct {
    std::optional<double> from, to;
    int points = 400;
    std::string method = "numeric";
    std::string output = "scan.csv";
  } scan_args;
  cmd_scan->add_option("--from", scan_args.from, "grid start (default: auto)");
  cmd_scan->add_option("--to", scan_args.to, "grid end (default: auto)");
  cmd_scan->add_option("--points", scan_args.points, "grid points");
  cmd_scan->add_option("--method", scan_args.method, "numeric or closedform")
      ->check(CLI::IsMember({"numeric", "closedform"}));
  cmd_scan->add_option("--output", scan_args.output, "CSV output path");

  auto* cmd_peaks = app.add_subcommand("peaks", "extrema and widths of a spectrum");
  add_param_options(cmd_peaks, args);
  struct {
    std::string input, column = "rho11", method = "numeric";
    std::optional<double> from, to;
    int points = 400;
  } peaks_args;
  cmd_peaks->add_option("--input", peaks_args.input, "analyze an existing scan CSV");
  cmd_peaks->add_option("--column", peaks_args.column, "observable column");
  cmd_peaks->add_option("--from", peaks_args.from, "grid start (default: auto)");
  cmd_peaks->add_option("--to", peaks_args.to, "grid end (default: auto)");
  cmd_peaks->add_option("--points", peaks_args.points, "grid points");
  cmd_peaks->add_option("--method", peaks_args.method, "numeric or closedform")
      ->check(CLI::IsMember({"numeric", "closedform"}));

  auto* cmd_poles = app.add_subcommand("poles", "denominator poles and residues");
  add_param_options(cmd_poles, args);
  struct {
    std::string sweep, output = "poles.csv";
    double from = 0.0, to = 0.0;
    int points = 100;
    bool log_spaced = false;
  } poles_args;
  cmd_poles->add_option("--sweep", poles_args.sweep, "track over eps2 or delta1")
      ->check(CLI::IsMember({"eps2", "delta1"}));
  cmd_poles->add_option("--from", poles_args.from, "sweep start");
  cmd_poles->add_option("--to", poles_args.to, "sweep end");
  cmd_poles->add_option("--points", poles_args.points, "sweep points");
  cmd_poles->add_flag("--log", poles_args.log_spaced, "log-spaced sweep grid");
  cmd_poles->add_option("--output", poles_args.output, "trajectory CSV path (sweep mode)");

  auto* cmd_regime = app.add_subcommand("regime", "classify ATS vs CIC");
  add_param_options(cmd_regime, args);

  auto* cmd_border = app.add_subcommand("border", "critical clock power vs eps1");
  add_param_options(cmd_border, args);
  struct {
    double from = 0.1, to = 10.0;
    int points = 100;
    bool log_spaced = true;
    std::string output = "border.csv";
  } border_args;
  cmd_border->add_option("--from", border_args.from, "eps1 start");
  cmd_border->add_option("--to", border_args.to, "eps1 end");
  cmd_border->add_option("--points", border_args.points, "grid points");
  cmd_border->add_flag("--log,!--linear", border_args.log_spaced, "log spacing (default)");
  cmd_border->add_option("--output", border_args.output, "CSV output path");

  auto* cmd_figure = app.add_subcommand("figure", "reproduce a stock figure data set");
  add_param_options(cmd_figure, args);
  std::string figure_name, figure_outdir = ".";
  cmd_figure->add_option("name", figure_name, "one of: 1b 1c 1d 2 3 4 5a 5b 6a 6b")
      ->required();
  cmd_figure->add_option("--outdir", figure_outdir, "output directory");

  auto* cmd_selftest = app.add_subcommand("selftest", "quick internal consistency checks");
  (void)cmd_selftest;

  // A first token that is neither a flag nor a known subcommand is an
  // unknown command (exit 4), distinct from ordinary flag misuse (exit 2).
  if (argc >= 2 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    std::cerr << "unknown command: " << argv[1] << "\n";
    return 4;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ExtrasError& e) {
    std::cerr << e.what() << "\n";
    return 4;  // unknown command
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_selftest->parsed()) return run_selftest();

    const SystemParams params = resolve_params(args);

    if (cmd_steady->parsed()) {
      const BlochState s = steady_state(build_generator(params));
      const AffineGenerator g = build_generator(params);
      json out;
      out["params"] = params_json(params);
      for (size_t i = 0; i < kScanColumns.size(); ++i) {
        const auto obs = std::array<double, 9>{
            s.x[kRho11],   s.x[kRho22],   s.rho33(),     s.x[kReRho12], s.x[kImRho12],
            s.x[kReRho13], s.x[kImRho13], s.x[kReRho23], s.x[kImRho23]};
        out["state"][kScanColumns[i]] = obs[i];
      }
      out["residual_inf"] = (g.A * s.x + g.c).cwiseAbs().maxCoeff();
      out["hierarchy_warnings"] = check_limit_hierarchy(params);
      emit(out, steady_output);
    } else if (cmd_scan->parsed()) {
      std::vector<double> grid;
      if (scan_args.from && scan_args.to)
        grid = make_grid(*scan_args.from, *scan_args.to, scan_args.points, false);
      else
        grid = default_grid(params);
      const auto method =
          scan_args.method == "numeric" ? ScanMethod::Numeric : ScanMethod::Closedform;
      const SpectrumScan s = scan(params, grid, method, args.threads);
      CsvTable t;
      t.header.push_back("delta2");
      for (const char* c : kScanColumns) t.header.push_back(c);
      for (size_t i = 0; i < s.grid.size(); ++i) {
        std::vector<double> row{s.grid[i]};
        row.insert(row.end(), s.rows[i].begin(), s.rows[i].end());
        t.rows.push_back(std::move(row));
      }
      write_csv(scan_args.output, t);
      // metadata sidecar with the content hash of the CSV just written
      {
        std::ifstream f(scan_args.output, std::ios::binary);
        const std::string data((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
        json meta;
        meta["tool"] = "vsys";
        meta["version"] = kVersion;
        meta["file"] = std::filesystem::path(scan_args.output).filename().string();
        meta["params"] = params_json(params);
        meta["method"] = scan_args.method;
        meta["grid"] = {{"kind", "delta2"},
                        {"points", grid.size()},
                        {"min", grid.front()},
                        {"max", grid.back()}};
        meta["warnings"] = check_limit_hierarchy(params);
        meta["content_sha1"] = git_blob_sha1(data);
        std::ofstream mf(scan_args.output + ".meta.json", std::ios::binary);
        mf << meta.dump(2) << "\n";
      }
      std::cout << "wrote " << scan_args.output << " (" << grid.size() << " points)\n";
    } else if (cmd_peaks->parsed()) {
      SpectrumScan s;
      const int col = column_index(peaks_args.column);
      if (!peaks_args.input.empty()) {
        const CsvTable t = read_csv(peaks_args.input);
        if (t.header.empty() || t.header[0] != "delta2")
          throw Error(Errc::BadInput, "expected a scan CSV with a delta2 column");
        s.params = params;
        for (const auto& row : t.rows) {
          if (row.size() < 10) throw Error(Errc::BadInput, "short row in scan CSV");
          s.grid.push_back(row[0]);
          std::array<double, 9> obs{};
          for (int i = 0; i < 9; ++i) obs[i] = row[i + 1];
          s.rows.push_back(obs);
        }
      } else {
        std::vector<double> grid;
        if (peaks_args.from && peaks_args.to)
          grid = make_grid(*peaks_args.from, *peaks_args.to, peaks_args.points, false);
        else
          grid = default_grid(params);
        const auto method =
            peaks_args.method == "numeric" ? ScanMethod::Numeric : ScanMethod::Closedform;
        s = scan(params, grid, method, args.threads);
      }
      json out = peaks_json(find_peaks(s, col));
      out["column"] = peaks_args.column;
      emit(out, "");
    } else if (cmd_poles->parsed()) {
      if (poles_args.sweep.empty()) {
        json out = poles_json(physical_poles(params));
        out["params"] = params_json(params);
        emit(out, "");
      } else {
        SweepSpec sweep;
        sweep.variable = poles_args.sweep == "eps2" ? SweepSpec::Variable::Eps2
                                                    : SweepSpec::Variable::Delta1;
        sweep.grid = make_grid(poles_args.from, poles_args.to, poles_args.points,
                               poles_args.log_spaced);
        const TrackResult tr = track(params, sweep);
        CsvTable t;
        t.header = {poles_args.sweep};
        for (int k = 1; k <= 4; ++k) {
          t.header.push_back("re_pole_" + std::to_string(k));
          t.header.push_back("im_pole_" + std::to_string(k));
          t.header.push_back("re_residue_" + std::to_string(k));
          t.header.push_back("im_residue_" + std::to_string(k));
        }
        for (size_t i = 0; i < tr.sets.size(); ++i) {
          std::vector<double> row{sweep.grid[i]};
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
        write_csv(poles_args.output, t);
        for (const auto& w : tr.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "wrote " << poles_args.output << " (" << sweep.grid.size() << " points)\n";
      }
    } else if (cmd_regime->parsed()) {
      const RegimeReport r = regime_report(params);
      json out;
      out["params"] = params_json(params);
      out["eps2_c"] = r.eps2_c;
      out["eps2_c_strong"] = r.eps2_c_strong;
      out["regime"] = to_string(r.tag);
      if (r.lambda) {
        out["lambda"] = {{"re_lambda1", r.lambda->lambda1.real()},
                         {"im_lambda1", r.lambda->lambda1.imag()},
                         {"re_lambda2", r.lambda->lambda2.real()},
                         {"im_lambda2", r.lambda->lambda2.imag()},
                         {"a", r.lambda->a},
                         {"b_squared", r.lambda->b_squared}};
        if (r.lambda->regime.tag == RegimeTag::Ats) {
          out["lambda"]["lambda0"] = r.lambda->lambda0;
          out["lambda"]["gamma0"] = r.lambda->gamma0;
        }
      }
      if (r.poles) out["poles"] = poles_json(*r.poles);
      out["hierarchy_warnings"] = r.hierarchy_warnings;
      emit(out, "");
    } else if (cmd_border->parsed()) {
      const auto grid = make_grid(border_args.from, border_args.to, border_args.points,
                                  border_args.log_spaced);
      CsvTable t;
      t.header = {"eps1", "eps2_c", "eps2_c_strong"};
      for (double e1 : grid) {
        SystemParams q = params;
        q.eps1 = e1;
        t.rows.push_back({e1, critical_eps2(q), critical_eps2_strong(q)});
      }
      write_csv(border_args.output, t);
      std::cout << "wrote " << border_args.output << " (" << grid.size() << " points)\n";
    } else if (cmd_figure->parsed()) {
      ParamOverrides o;
      o.nu = args.nu;
      o.gamma_l = args.gamma_l;
      o.eps1 = args.eps1;
      o.eps2 = args.eps2;
      o.delta1 = args.delta1;
      const auto written = figure(figure_name, o, figure_outdir, args.threads);
      for (const auto& path : written) std::cout << "wrote " << path << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    if (e.code() == Errc::UnknownFigure) return 4;
    return e.is_parameter_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
