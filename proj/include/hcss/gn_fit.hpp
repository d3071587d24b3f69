#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hcss/awgn.hpp"
#include "hcss/error.hpp"
#include "hcss/metrics.hpp"

namespace hcss {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// One launch-power measurement, linear units.
struct SweepRecord {
  double power_mw = 0.0;
  double eff_snr = 0.0;
  std::optional<double> air_b4d;
};

// Back-to-back reference: OSNR and effective SNR in dB, signal bandwidth in GHz.
struct BtbPoint {
  double osnr_db = 0.0;
  double eff_snr_db = 0.0;
  double bw_ghz = 0.0;
};

// 1/SNR = a/P + b P^2 + c.
struct GnParams {
  double a = 0.0;  // mW
  double b = 0.0;  // mW^-2
  double c = 0.0;
  bool clamped = false;
};

struct GnFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::optional<double> k_air;
  double air_residual = 0.0;  // rms, b/4D
  double rms_db = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline double gn_snr(double a, double b, double c, double p_mw) { return p_mw / (a + c * p_mw + b * p_mw * p_mw * p_mw); }
inline double gn_snr(const GnFit& f, double p_mw) { return gn_snr(f.a, f.b, f.c, p_mw); }

inline void check_records(const std::vector<SweepRecord>& records) {
  for (const auto& r : records) {
    if (!(r.power_mw > 0.0) || !(r.eff_snr > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "sweep records need positive power and SNR");
    }
  }
}

// c from the back-to-back point, a from the lowest-power record with the
// nonlinear term neglected, b from the highest-power record.
inline GnParams initial_guess(const std::vector<SweepRecord>& records, const std::optional<BtbPoint>& btb) {
  if (records.size() < 3) throw Error(ErrorCode::InsufficientData, "GN fit needs at least three records");
  check_records(records);
  auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                      [](const auto& x, const auto& y) { return x.power_mw < y.power_mw; });
  GnParams g;
  if (btb) {
    g.c = 1.0 / db_to_linear(btb->eff_snr_db) - btb->bw_ghz / (db_to_linear(btb->osnr_db) * kOsnrReferenceGhz);
  }
  if (g.c < 0.0) {
    g.c = 0.0;
    g.clamped = true;
  }
  g.a = lo->power_mw / lo->eff_snr - g.c * lo->power_mw;
  if (!(g.a > 0.0)) {
    g.a = lo->power_mw / lo->eff_snr;
    g.c = 0.0;
    g.clamped = true;
  }
  const double p = hi->power_mw;
  g.b = 1.0 / (hi->eff_snr * p * p) - g.a / (p * p * p) - g.c / (p * p);
  if (g.b < 0.0) {
    g.b = 0.0;
    g.clamped = true;
  }
  return g;
}

// Levenberg-Marquardt on sum (10 log10 SNR_model - 10 log10 SNR_data)^2 with
// a > 0 and b, c >= 0 enforced by projection.
inline GnFit fit_snr(const std::vector<SweepRecord>& records, const GnParams& guess) {
  if (records.size() < 3) throw Error(ErrorCode::InsufficientData, "GN fit needs at least three records");
  check_records(records);
  const double kdb = 10.0 / std::log(10.0);
  double pmax = 0.0;
  for (const auto& r : records) pmax = std::max(pmax, r.power_mw);

  Eigen::Vector3d theta(guess.a, guess.b, guess.c);
  // Magnitude at which each term starts to matter; sets the relative-change floor.
  const Eigen::Vector3d typical(guess.a, guess.a / (pmax * pmax * pmax), guess.a / pmax);

  const std::size_t n = records.size();
  auto residuals = [&](const Eigen::Vector3d& t, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(n));
    if (jac) jac->resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t j = 0; j < n; ++j) {
      const double p = records[j].power_mw;
      const double den = t[0] + t[2] * p + t[1] * p * p * p;
      const auto row = static_cast<Eigen::Index>(j);
      r[row] = kdb * std::log(p / den) - linear_to_db(records[j].eff_snr);
      if (jac) {
        (*jac)(row, 0) = -kdb / den;
        (*jac)(row, 1) = -kdb * p * p * p / den;
        (*jac)(row, 2) = -kdb * p / den;
      }
    }
  };
  auto project = [&](Eigen::Vector3d t) {
    t[0] = std::max(t[0], 1e-12 * typical[0]);
    t[1] = std::max(t[1], 0.0);
    t[2] = std::max(t[2], 0.0);
    return t;
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals(theta, r, &jac);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  GnFit fit;
  for (std::size_t it = 1; it <= 200; ++it) {
    fit.iterations = it;
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d jtr = jac.transpose() * r;
    bool improved = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int tries = 0; tries < 40 && !improved; ++tries) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d) damped(d, d) += mu * std::max(jtj(d, d), 1e-300);
      step = damped.ldlt().solve(-jtr);
      const Eigen::Vector3d cand = project(theta + step);
      Eigen::VectorXd rc;
      residuals(cand, rc, nullptr);
      const double cc = rc.squaredNorm();
      if (cc <= cost) {
        step = cand - theta;
        theta = cand;
        cost = cc;
        improved = true;
        mu = std::max(mu / 3.0, 1e-15);
      } else {
        mu *= 4.0;
      }
    }
    residuals(theta, r, &jac);
    double rel = 0.0;
    for (int d = 0; d < 3; ++d) rel = std::max(rel, std::abs(step[d]) / (std::abs(theta[d]) + 1e-6 * typical[d]));
    // No descent step left means the minimum is resolved to working precision.
    if (!improved || rel < 1e-9 || cost == 0.0) {
      fit.converged = true;
      break;
    }
  }
  fit.a = theta[0];
  fit.b = theta[1];
  fit.c = theta[2];
  fit.rms_db = std::sqrt(cost / static_cast<double>(n));
  return fit;
}

struct OptimalPower {
  double power_mw = std::numeric_limits<double>::infinity();
  double snr = 0.0;
  bool unbounded = false;
};

// d/dP [P / (a + cP + bP^3)] = 0  =>  P = (a / 2b)^(1/3).
inline OptimalPower optimal_power(const GnFit& f) {
  OptimalPower o;
  if (!(f.b > 0.0)) {
    o.unbounded = true;
    o.snr = f.c > 0.0 ? 1.0 / f.c : std::numeric_limits<double>::infinity();
    return o;
  }
  o.power_mw = std::cbrt(f.a / (2.0 * f.b));
  o.snr = gn_snr(f, o.power_mw);
  return o;
}

// Least-squares k in AIR = k log10(SNR); SNR from the fitted curve when given.
inline GnFit& fit_air(const std::vector<SweepRecord>& records, GnFit& fit, bool use_fitted_snr = true) {
  double sxy = 0.0, sxx = 0.0;
  std::size_t used = 0;
  for (const auto& r : records) {
    if (!r.air_b4d) continue;
    const double x = std::log10(use_fitted_snr ? gn_snr(fit, r.power_mw) : r.eff_snr);
    sxy += x * *r.air_b4d;
    sxx += x * x;
    ++used;
  }
  if (used == 0 || sxx == 0.0) throw Error(ErrorCode::InsufficientData, "no AIR values to fit");
  const double k = sxy / sxx;
  double ss = 0.0;
  for (const auto& r : records) {
    if (!r.air_b4d) continue;
    const double x = std::log10(use_fitted_snr ? gn_snr(fit, r.power_mw) : r.eff_snr);
    ss += (*r.air_b4d - k * x) * (*r.air_b4d - k * x);
  }
  fit.k_air = k;
  fit.air_residual = std::sqrt(ss / static_cast<double>(used));
  return fit;
}

inline bool looks_numeric(const std::string& cell) {
  try {
    std::stod(cell);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// Input CSV: power_dbm,eff_snr_db[,air_b4D]; header row optional.
inline std::vector<SweepRecord> read_sweep_records(std::istream& is) {
  std::vector<SweepRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() < 2 || cells.size() > 3) {
      throw Error(ErrorCode::ParseError, "sweep CSV line " + std::to_string(lineno) + " needs 2 or 3 columns");
    }
    try {
      std::size_t used = 0;
      SweepRecord r;
      r.power_mw = dbm_to_mw(std::stod(cells[0], &used));
      if (used != cells[0].size()) throw std::invalid_argument("trailing");
      r.eff_snr = db_to_linear(std::stod(cells[1], &used));
      if (used != cells[1].size()) throw std::invalid_argument("trailing");
      if (cells.size() == 3 && !cells[2].empty()) r.air_b4d = std::stod(cells[2]);
      out.push_back(r);
    } catch (const std::exception&) {
      if (out.empty() && lineno == 1 && !looks_numeric(cells[0])) continue;  // header
      throw Error(ErrorCode::ParseError, "sweep CSV line " + std::to_string(lineno) + " is not numeric");
    }
  }
  return out;
}

inline void write_fit_curve_csv(std::ostream& os, const GnFit& f, const std::vector<double>& grid_dbm) {
  os << "power_dbm,eff_snr_db" << (f.k_air ? ",air_b4D" : "") << '\n';
  char buf[128];
  for (double p : grid_dbm) {
    const double snr = gn_snr(f, dbm_to_mw(p));
    if (f.k_air) {
      std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f\n", p, linear_to_db(snr), *f.k_air * std::log10(snr));
    } else {
      std::snprintf(buf, sizeof buf, "%.4f,%.6f\n", p, linear_to_db(snr));
    }
    os << buf;
  }
}

}  // namespace hcss
