#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/diagnostics/lyapunov.hpp"
#include "hpclab/diagnostics/relaxation.hpp"
#include "hpclab/hpc/solver.hpp"
#include "hpclab/ks/solver.hpp"
#include "hpclab/linear/decay_study.hpp"
#include "hpclab/linear/symbol.hpp"

namespace hpclab::io {

/// Plain comma separated tables with a header row and round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : os_(path) {
    if (!os_) throw std::runtime_error("cannot write " + path);
    os_ << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }

  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline void write_series_csv(const std::string& path, const std::vector<hpc::SeriesRow>& rows) {
  CsvWriter w(path, {"t", "mass", "n_low", "n_high", "u_low", "u_high", "psi_low", "grad_psi_high", "aggregate"});
  for (const auto& r : rows) w.row(r.t, r.mass, r.n_low, r.n_high, r.u_low, r.u_high, r.psi_low, r.psi_high, r.aggregate);
}

inline void write_ks_series_csv(const std::string& path, const std::vector<ks::KsSeriesRow>& rows) {
  CsvWriter w(path, {"tau", "mass", "besov_low", "besov_high"});
  for (const auto& r : rows) w.row(r.tau, r.mass, r.low, r.high);
}

inline void write_eigen_scan_csv(const std::string& path, const linear::StabilityScan& scan) {
  CsvWriter w(path, {"xi", "re1", "im1", "re2", "im2", "re3", "im3", "complex_pair"});
  for (std::size_t i = 0; i < scan.xi.size(); ++i) {
    const auto& l = scan.triples[i].lambda;
    w.row(scan.xi[i], l[0].real(), l[0].imag(), l[1].real(), l[1].imag(), l[2].real(), l[2].imag(),
          scan.triples[i].complex_pair ? 1 : 0);
  }
}

inline void write_decay_csv(const std::string& path, const linear::DecayStudyResult& r) {
  CsvWriter w(path, {"eps_t", "t", "norm", "in_window"});
  for (std::size_t i = 0; i < r.t.size(); ++i) w.row(r.eps_t[i], r.t[i], r.norm[i], r.in_window[i] ? 1 : 0);
}

inline void write_lyapunov_csv(const std::string& path, const diagnostics::LyapunovReport& rep, double eps) {
  CsvWriter w(path, {"t", "j", "L", "H", "ratio1", "ratio2", "w_min", "w_max"});
  for (const auto& r : rep.records) w.row(r.t, r.j, r.L, r.H, r.ratio1(), r.ratio2(eps), r.w_min, r.w_max);
}

inline void write_relaxation_csv(const std::string& path, const diagnostics::RelaxationReport& rep) {
  CsvWriter w(path, {"eps", "sup_drho", "int_drho", "int_du", "int_dphi", "int_flux", "int_elliptic", "int_psi_rate",
                     "samples"});
  for (const auto& r : rep.rows) {
    w.row(r.eps, r.sup_drho, r.int_drho, r.int_du, r.int_dphi, r.int_flux, r.int_elliptic, r.int_psi_rate, r.samples);
  }
}

}  // namespace hpclab::io
