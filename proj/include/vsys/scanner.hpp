#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vsys/closedform.hpp"
#include "vsys/params.hpp"
#include "vsys/poleatlas.hpp"

namespace vsys {

enum class ScanMethod { Numeric, Closedform };

inline const char* to_string(ScanMethod m) {
  return m == ScanMethod::Numeric ? "numeric" : "closedform";
}

// Column order of a spectrum scan row.
inline constexpr std::array<const char*, 9> kScanColumns = {
    "rho11", "rho22", "rho33", "re_rho12", "im_rho12",
    "re_rho13", "im_rho13", "re_rho23", "im_rho23"};

struct SpectrumScan {
  std::vector<double> grid;                 // ordered delta2 values
  std::vector<std::array<double, 9>> rows;  // one observable row per grid point
  ScanMethod method = ScanMethod::Numeric;
  SystemParams params;                      // snapshot (delta2 field unused)
};

struct Peak {
  double position;
  double height;  // value at the extremum after quadratic refinement
  double fwhm;
  bool is_maximum;
};

struct PeakReport {
  std::vector<Peak> peaks;
  double baseline;  // mean of the outermost two samples on each side
};

struct RegimeReport {
  double eps2_c;
  double eps2_c_strong;
  RegimeTag tag;
  // Populated for delta1 == 0, where the closed-form pair applies.
  std::optional<LambdaPair> lambda;
  // Populated for delta1 != 0, where the tag comes from the pole structure.
  std::optional<PoleSet> poles;
  std::vector<std::string> hierarchy_warnings;
};

// Solve the spectrum over a delta2 grid. Numeric rows hold the full
// reconstructed observables; closed-form rows hold rho11 only (rho22 and the
// coherences are outside the reduced formula and are written as zero, with
// rho33 = 1 - rho11). Grid points are dispatched to `threads` workers
// (0 = hardware concurrency) and gathered in grid order, so the output is
// deterministic and independent of scheduling.
SpectrumScan scan(const SystemParams& p, const std::vector<double>& grid,
                  ScanMethod method, unsigned threads = 0);

// Default scan grid: 400 uniform points over +-3 max(lambda0 estimate,
// gamma1, eps1). In the CIC regime a logarithmically refined sub-grid of
// ~200 points within +-10 w_narrow is merged in, covering both the sharp
// line-center structure and the broad pedestal.
std::vector<double> default_grid(const SystemParams& p);

// Local extrema by 3-point test, refined by a parabola through the extremum
// and its neighbors; FWHM from linear interpolation of the half-excursion
// crossings relative to the scan baseline. Throws NoPeaks for monotone data.
PeakReport find_peaks(const SpectrumScan& s, int column = 0);

RegimeReport regime_report(const SystemParams& p);

// Optional overrides applied on top of figure defaults.
struct ParamOverrides {
  std::optional<double> nu, gamma_l, eps1, eps2, delta1;
};

// Reproduce one of the stock result sets; writes one CSV (plus JSON metadata
// sidecar) per panel into outdir and returns the paths written. Valid names:
// 1b 1c 1d 2 3 4 5a 5b 6a 6b. Defaults nu = 2.28e-6, gamma_l = 1e-4
// (indium-ion-like) unless overridden.
std::vector<std::string> figure(const std::string& name, const ParamOverrides& overrides,
                                const std::string& outdir, unsigned threads = 0);

}  // namespace vsys
