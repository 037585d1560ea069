#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace omegascale {

// Classical W^(q), Z^(q), W^(q)' sampled on a uniform grid 0 = x_0 < ... < x_n.
// W is taken to vanish on the negative half-line; Z equals 1 there.
struct ScaleTable {
  double h = 0.0;
  double q = 0.0;
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> z;
  std::vector<double> wprime;

  double x_max() const { return x.empty() ? 0.0 : x.back(); }
  double w0() const { return w.empty() ? 0.0 : w.front(); }

  // Linear interpolation inside the grid. Throws DomainError beyond x_max.
  double w_at(double xv) const;
  double z_at(double xv) const;
  double wprime_at(double xv) const;

  // Checks uniform spacing, x_0 = 0, matching column lengths, w nondecreasing
  // and z(0) = 1. Throws ConfigError describing the first violation.
  void validate() const;
};

// Reads a CSV with header `x,w,z,wprime`. The killing rate is not part of the
// file and has to be supplied by the caller.
ScaleTable load_scale_table_csv(const std::string& path, double q);

// Phi table: pairs (q_i, Phi(q_i)) with q strictly increasing. CSV header `q,phi`.
struct PhiTable {
  std::vector<double> q;
  std::vector<double> phi;

  double at(double qv) const;
  void validate() const;
};

PhiTable load_phi_table_csv(const std::string& path);

}  // namespace omegascale
