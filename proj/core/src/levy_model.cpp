#include "omegascale/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "omegascale/errors.hpp"
#include "overloaded.hpp"

namespace omegascale {

namespace {

using detail::overloaded;

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string expected;
  for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
  if (line != expected) throw ConfigError(path + ": expected header `" + expected + "`");

  std::vector<std::vector<double>> cols(header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= cols.size()) throw ConfigError(path + ": too many columns on row " + std::to_string(row));
      try {
        std::size_t used = 0;
        cols[c].push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path + ": bad number `" + cell + "` on row " + std::to_string(row));
      }
      ++c;
    }
    if (c != cols.size()) throw ConfigError(path + ": too few columns on row " + std::to_string(row));
  }
  return cols;
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double h, double xv) {
  const double pos = xv / h;
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= xs.size() - 1) return ys.back();
  const double t = pos - static_cast<double>(i);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace

double ScaleTable::w_at(double xv) const {
  if (xv < 0.0) return 0.0;
  if (xv > x_max() * (1.0 + 1e-14)) throw DomainError("scale table evaluated beyond its grid");
  return interp(x, w, h, xv);
}

double ScaleTable::z_at(double xv) const {
  if (xv <= 0.0) return 1.0;
  if (xv > x_max() * (1.0 + 1e-14)) throw DomainError("scale table evaluated beyond its grid");
  return interp(x, z, h, xv);
}

double ScaleTable::wprime_at(double xv) const {
  if (xv < 0.0) return 0.0;
  if (xv > x_max() * (1.0 + 1e-14)) throw DomainError("scale table evaluated beyond its grid");
  return interp(x, wprime, h, xv);
}

void ScaleTable::validate() const {
  if (x.size() < 2) throw ConfigError("scale table needs at least two rows");
  if (w.size() != x.size() || z.size() != x.size() || wprime.size() != x.size())
    throw ConfigError("scale table columns have different lengths");
  if (x.front() != 0.0) throw ConfigError("scale table grid must start at x = 0");
  if (!(h > 0.0)) throw ConfigError("scale table step must be positive");
  if (q < 0.0) throw ConfigError("scale table killing rate must be nonnegative");
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double expect = static_cast<double>(i) * h;
    if (std::abs(x[i] - expect) > 1e-9 * std::max(1.0, expect))
      throw ConfigError("scale table grid is not uniform at row " + std::to_string(i + 1));
    if (w[i] < w[i - 1]) throw ConfigError("scale table w decreases at row " + std::to_string(i + 1));
  }
  if (std::abs(z.front() - 1.0) > 1e-12) throw ConfigError("scale table requires z(0) = 1");
}

ScaleTable load_scale_table_csv(const std::string& path, double q) {
  auto cols = read_csv(path, {"x", "w", "z", "wprime"});
  ScaleTable t;
  t.q = q;
  t.x = std::move(cols[0]);
  t.w = std::move(cols[1]);
  t.z = std::move(cols[2]);
  t.wprime = std::move(cols[3]);
  if (t.x.size() >= 2) t.h = t.x[1] - t.x[0];
  t.validate();
  return t;
}

double PhiTable::at(double qv) const {
  if (qv < 0.0) throw DomainError("phi table evaluated at negative q");
  if (qv <= q.front()) return phi.front();
  if (qv >= q.back()) {
    if (qv > q.back() * (1.0 + 1e-14)) throw DomainError("phi table evaluated beyond its range");
    return phi.back();
  }
  auto it = std::upper_bound(q.begin(), q.end(), qv);
  const std::size_t i = static_cast<std::size_t>(it - q.begin()) - 1;
  const double t = (qv - q[i]) / (q[i + 1] - q[i]);
  return phi[i] + t * (phi[i + 1] - phi[i]);
}

void PhiTable::validate() const {
  if (q.size() < 2 || phi.size() != q.size()) throw ConfigError("phi table needs two equal columns of length >= 2");
  if (q.front() != 0.0) throw ConfigError("phi table must start at q = 0");
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (!(q[i] > q[i - 1])) throw ConfigError("phi table q column must be strictly increasing");
    if (phi[i] < phi[i - 1]) throw ConfigError("phi table phi column must be nondecreasing");
  }
}

PhiTable load_phi_table_csv(const std::string& path) {
  auto cols = read_csv(path, {"q", "phi"});
  PhiTable t{std::move(cols[0]), std::move(cols[1])};
  t.validate();
  return t;
}

void validate(const LevyModel& model) {
  std::visit(overloaded{
                 [](const BrownianDrift& m) {
                   if (!std::isfinite(m.mu) || !(m.sigma > 0.0) || !std::isfinite(m.sigma))
                     throw DomainError("Brownian drift needs finite mu and sigma > 0");
                 },
                 [](const CramerLundberg& m) {
                   if (!(m.mu > 0.0) || !std::isfinite(m.mu))
                     throw DomainError("Cramer-Lundberg premium rate mu must be positive");
                   if (!(m.vartheta >= 0.0) || !std::isfinite(m.vartheta))
                     throw DomainError("Cramer-Lundberg jump intensity must be nonnegative");
                   if (!(m.rho > 0.0) || !std::isfinite(m.rho))
                     throw DomainError("Cramer-Lundberg jump rate rho must be positive");
                 },
                 [](const Tabulated& m) {
                   if (!m.scale || !m.phi) throw DomainError("tabulated model is missing its tables");
                   m.scale->validate();
                   m.phi->validate();
                 },
             },
             model);
}

const char* model_name(const LevyModel& model) {
  return std::visit(overloaded{[](const BrownianDrift&) { return "bm"; },
                               [](const CramerLundberg&) { return "cl"; },
                               [](const Tabulated&) { return "table"; }},
                    model);
}

double psi(const LevyModel& model, double theta) {
  if (!(theta >= 0.0)) throw DomainError("psi: theta must be nonnegative");
  return std::visit(overloaded{
                        [&](const BrownianDrift& m) {
                          return 0.5 * m.sigma * m.sigma * theta * theta + m.mu * theta;
                        },
                        [&](const CramerLundberg& m) {
                          return m.mu * theta * (theta + m.varsigma()) / (theta + m.rho);
                        },
                        [](const Tabulated&) -> double {
                          throw UnsupportedModelError("psi is not available for tabulated models");
                        },
                    },
                    model);
}

double psi_prime(const LevyModel& model, double theta) {
  if (!(theta >= 0.0)) throw DomainError("psi': theta must be nonnegative");
  return std::visit(overloaded{
                        [&](const BrownianDrift& m) { return m.sigma * m.sigma * theta + m.mu; },
                        [&](const CramerLundberg& m) {
                          const double d = theta + m.rho;
                          return m.mu * (theta * theta + 2.0 * m.rho * theta + m.varsigma() * m.rho) / (d * d);
                        },
                        [](const Tabulated&) -> double {
                          throw UnsupportedModelError("psi' is not available for tabulated models");
                        },
                    },
                    model);
}

double phi_inverse(const LevyModel& model, double q) {
  if (!(q >= 0.0)) throw DomainError("Phi: q must be nonnegative");
  if (const auto* t = std::get_if<Tabulated>(&model)) return t->phi->at(q);

  const double tol = 1e-12 * std::max(1.0, q);
  auto f = [&](double s) { return psi(model, s) - q; };

  if (q == 0.0 && psi_prime(model, 0.0) >= 0.0) return 0.0;

  double hi = 1.0;
  int guard = 0;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 2000 || !std::isfinite(hi)) throw ConvergenceError("Phi: could not bracket the root");
  }
  double lo = 0.0;
  if (q == 0.0) {
    // psi < 0 on (0, Phi(0)); halve from hi until we land there.
    lo = hi;
    guard = 0;
    while (f(lo) >= 0.0) {
      lo *= 0.5;
      if (++guard > 2000) throw ConvergenceError("Phi: could not locate the negative region of psi");
    }
  }

  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const double fs = f(s);
    if (std::abs(fs) <= tol) return s;
    if (fs > 0.0)
      hi = s;
    else
      lo = s;
    const double d = psi_prime(model, s);
    double next = s - fs / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
  }
  if (std::abs(f(s)) <= tol) return s;
  throw ConvergenceError("Phi: Newton/bisection did not reach the residual tolerance");
}

double phi_inverse_prime(const LevyModel& model, double q) {
  return 1.0 / psi_prime(model, phi_inverse(model, q));
}

bool has_closed_form(const LevyModel& model) { return !std::holds_alternative<Tabulated>(model); }

double scale_atom(const LevyModel& model) {
  return std::visit(overloaded{[](const BrownianDrift&) { return 0.0; },
                               [](const CramerLundberg& m) { return 1.0 / m.mu; },
                               [](const Tabulated& t) { return t.scale->w0(); }},
                    model);
}

}  // namespace omegascale
