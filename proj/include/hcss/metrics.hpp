#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hcss/codebook.hpp"
#include "hcss/demapper.hpp"
#include "hcss/error.hpp"
#include "hcss/maxwell_boltzmann.hpp"
#include "hcss/symbol_mapping.hpp"

namespace hcss {

inline constexpr std::size_t kBitsPer4D = 12;
inline constexpr double kSnrCapDb = 60.0;
inline constexpr double kBchThreshold = 5e-5;
inline constexpr double kBchRate = 0.9922;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

struct MetricReport {
  double entropy_b4d = 0.0;
  double rate_loss_b4d = 0.0;
  double air_b4d = 0.0;
  double ngmi = 0.0;
  double effective_snr_db = 0.0;
  double avg_energy = 0.0;
  double power_penalty_db = 0.0;
};

inline void write_report(std::ostream& os, const MetricReport& r) {
  os << "entropy_b4D=" << r.entropy_b4d << '\n'
     << "rate_loss_b4D=" << r.rate_loss_b4d << '\n'
     << "air_b4D=" << r.air_b4d << '\n'
     << "ngmi=" << r.ngmi << '\n'
     << "effective_snr_db=" << r.effective_snr_db << '\n'
     << "avg_energy=" << r.avg_energy << '\n'
     << "power_penalty_db=" << r.power_penalty_db << '\n';
}

// Shortfall of H(X) against 4 (R_S + 1), b/4D.
inline double rate_loss_b4d(double entropy_b4d, double shaping_rate) { return entropy_b4d - 4.0 * (shaping_rate + 1.0); }

inline double rate_loss_b4d(const PmfTable& pmf, const ShaperCodebook& cb) {
  return rate_loss_b4d(signal_entropy_b4d(pmf), cb.shaping_rate_value());
}

// 10 log10(E / E_ref) against MB over all positive odd integers whose
// per-amplitude entropy equals the shaping rate.
inline double power_penalty_db(double scheme_avg_energy, double shaping_rate) {
  const auto ref = fit_mb_unconstrained(shaping_rate);
  return linear_to_db(scheme_avg_energy / ref.average_energy());
}

// Received-symbol centroid of every transmitted 4D point; points never sent
// are absent and keep their nominal position.
class CentroidMap {
 public:
  const Point4& operator()(const Symbol4& x) const {
    auto it = centroids_.find(x);
    if (it != centroids_.end()) return it->second;
    nominal_ = {static_cast<double>(x[0]), static_cast<double>(x[1]), static_cast<double>(x[2]),
                static_cast<double>(x[3])};
    return nominal_;
  }

  std::size_t size() const noexcept { return centroids_.size(); }
  std::map<Symbol4, Point4>& points() noexcept { return centroids_; }
  const std::map<Symbol4, Point4>& points() const noexcept { return centroids_; }

 private:
  std::map<Symbol4, Point4> centroids_;
  mutable Point4 nominal_{};
};

inline CentroidMap adjust_centroids(std::span<const Symbol4> tx, std::span<const Point4> rx) {
  if (tx.size() != rx.size()) throw Error(ErrorCode::LengthMismatch, "tx and rx lengths differ");
  std::map<Symbol4, std::pair<Point4, std::size_t>> acc;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    auto& [sum, n] = acc[tx[i]];
    for (std::size_t d = 0; d < 4; ++d) sum[d] += rx[i][d];
    ++n;
  }
  CentroidMap out;
  for (auto& [x, s] : acc) {
    Point4 c{};
    for (std::size_t d = 0; d < 4; ++d) c[d] = s.first[d] / static_cast<double>(s.second);
    out.points().emplace(x, c);
  }
  return out;
}

inline std::vector<Point4> apply_centroids(const CentroidMap& map, std::span<const Symbol4> tx) {
  std::vector<Point4> out(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) out[i] = map(tx[i]);
  return out;
}

// Var[X'] / Var[Y - X'] with variances summed over the four real dimensions;
// capped at 60 dB when the residual vanishes.
inline double effective_snr(std::span<const Point4> tx_adjusted, std::span<const Point4> rx) {
  if (tx_adjusted.size() != rx.size() || tx_adjusted.empty()) {
    throw Error(ErrorCode::LengthMismatch, "effective SNR needs equal non-empty blocks");
  }
  const double n = static_cast<double>(rx.size());
  long double sig = 0, sig_mean[4] = {0, 0, 0, 0}, err = 0, err_mean[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < rx.size(); ++i) {
    for (std::size_t d = 0; d < 4; ++d) {
      const long double x = tx_adjusted[i][d];
      const long double e = rx[i][d] - x;
      sig += x * x;
      sig_mean[d] += x;
      err += e * e;
      err_mean[d] += e;
    }
  }
  for (std::size_t d = 0; d < 4; ++d) {
    sig -= sig_mean[d] * sig_mean[d] / n;
    err -= err_mean[d] * err_mean[d] / n;
  }
  const double cap = db_to_linear(kSnrCapDb);
  if (err <= 0 || static_cast<double>(sig / err) > cap) return cap;
  return static_cast<double>(sig / err);
}

// sigma^2 of the 4D auxiliary channel from a measured residual variance over N real dims.
inline double aux_noise_variance(double residual_variance_total, std::size_t real_dims = 4) {
  return 2.0 * residual_variance_total / static_cast<double>(real_dims);
}

// Accumulates sum_i H(B_i|Y) estimates. Costs are summed in 2^-40 fixed
// point so shards merge to the same total in any order.
class BitMetricAccumulator {
 public:
  static constexpr double kScale = 1099511627776.0;  // 2^40

  void add_symbol(std::span<const double> llrs, std::span<const std::uint8_t> bits) {
    double c = 0.0;
    for (std::size_t i = 0; i < llrs.size(); ++i) c += bit_cost(llrs[i], bits[i] != 0);
    total_ += static_cast<__int128>(std::llround(c * kScale));
    ++symbols_;
  }

  void merge(const BitMetricAccumulator& other) {
    total_ += other.total_;
    symbols_ += other.symbols_;
  }

  std::uint64_t symbols() const noexcept { return symbols_; }

  // Mean of sum_i H(B_i|Y) per symbol.
  double conditional_entropy() const {
    if (symbols_ == 0) return 0.0;
    return static_cast<double>(static_cast<long double>(total_) / kScale / static_cast<long double>(symbols_));
  }

 private:
  __int128 total_ = 0;
  std::uint64_t symbols_ = 0;
};

// [H(X) - sum_i H(B_i|Y)] - R_loss.
inline double air_bmd(double sum_conditional_entropy, double entropy_b4d, double rate_loss) {
  return entropy_b4d - sum_conditional_entropy - rate_loss;
}

inline double air_bmd(std::span<const double> llrs, std::span<const std::uint8_t> tx_bits, std::size_t m,
                      double entropy_b4d, double rate_loss) {
  if (llrs.size() != tx_bits.size() || llrs.size() % m != 0) {
    throw Error(ErrorCode::LengthMismatch, "LLR and bit streams must hold whole symbols");
  }
  BitMetricAccumulator acc;
  for (std::size_t i = 0; i < llrs.size(); i += m) acc.add_symbol(llrs.subspan(i, m), tx_bits.subspan(i, m));
  return air_bmd(acc.conditional_entropy(), entropy_b4d, rate_loss);
}

inline double ngmi_uniform(double air, std::size_t m = kBitsPer4D) { return air / static_cast<double>(m); }

inline double ngmi_shaped(double air, double shaping_rate, std::size_t m = kBitsPer4D) {
  return 1.0 - (4.0 * (shaping_rate + 1.0) - air) / static_cast<double>(m);
}

inline double ngmi(double air, bool shaped, double shaping_rate, std::size_t m = kBitsPer4D) {
  return shaped ? ngmi_shaped(air, shaping_rate, m) : ngmi_uniform(air, m);
}

// BER after LDPC decoding against nGMI; rows strictly increasing in nGMI.
class LdpcCurve {
 public:
  LdpcCurve() = default;
  explicit LdpcCurve(std::vector<std::pair<double, double>> rows) : rows_(std::move(rows)) {
    if (rows_.size() < 2) throw Error(ErrorCode::InvalidArgument, "LDPC curve needs at least two rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (!(rows_[i].second > 0.0)) throw Error(ErrorCode::InvalidArgument, "LDPC curve BER must be positive");
      if (i > 0 && !(rows_[i].first > rows_[i - 1].first)) {
        throw Error(ErrorCode::InvalidArgument, "LDPC curve nGMI must be strictly increasing");
      }
      if (i > 0 && rows_[i].second > rows_[i - 1].second) {
        throw Error(ErrorCode::InvalidArgument, "LDPC curve BER must be non-increasing");
      }
    }
  }

  const std::vector<std::pair<double, double>>& rows() const noexcept { return rows_; }

  static LdpcCurve read_csv(std::istream& is) {
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "LDPC curve line " + std::to_string(lineno));
      try {
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        if (rows.empty() && lineno == 1) continue;  // header row
        throw Error(ErrorCode::ParseError, "LDPC curve line " + std::to_string(lineno));
      }
    }
    return LdpcCurve(std::move(rows));
  }

 private:
  std::vector<std::pair<double, double>> rows_;
};

struct PostFecPrediction {
  double ber = 0.0;
  bool pass = false;
  bool extrapolated = false;
};

// log10(BER) interpolated linearly in nGMI. Below the table the first BER is
// held and the point fails; above it the last BER is held; nGMI >= 1 means an
// error-free channel.
inline PostFecPrediction predict_post_fec(double ngmi_value, const LdpcCurve& curve,
                                          double bch_threshold = kBchThreshold) {
  const auto& r = curve.rows();
  PostFecPrediction out;
  if (ngmi_value >= 1.0) {
    out.ber = 0.0;
  } else if (ngmi_value < r.front().first) {
    out.ber = r.front().second;
    out.extrapolated = true;
    out.pass = false;
    return out;
  } else if (ngmi_value > r.back().first) {
    out.ber = r.back().second;
    out.extrapolated = true;
  } else {
    auto it = std::lower_bound(r.begin(), r.end(), ngmi_value,
                               [](const auto& row, double v) { return row.first < v; });
    if (it->first == ngmi_value) {
      out.ber = it->second;
    } else {
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (ngmi_value - lo.first) / (hi.first - lo.first);
      out.ber = std::pow(10.0, std::log10(lo.second) + t * (std::log10(hi.second) - std::log10(lo.second)));
    }
  }
  out.pass = out.ber <= bch_threshold;
  return out;
}

// Smallest nGMI whose interpolated BER reaches the threshold.
inline std::optional<double> ngmi_threshold(const LdpcCurve& curve, double bch_threshold = kBchThreshold) {
  const auto& r = curve.rows();
  if (r.front().second <= bch_threshold) return r.front().first;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i].second <= bch_threshold) {
      const double l0 = std::log10(r[i - 1].second), l1 = std::log10(r[i].second), lt = std::log10(bch_threshold);
      return r[i - 1].first + (lt - l0) / (l1 - l0) * (r[i].first - r[i - 1].first);
    }
  }
  return std::nullopt;
}

// Net rate in Gb/s. Shaped: [4 R_S + (4 - m (1 - R_ldpc))] baud R_bch;
// uniform: m R_ldpc baud R_bch.
inline double net_rate_gbps(double symbol_rate_gbd, std::optional<double> shaping_rate, double ldpc_rate,
                            double bch_rate = kBchRate, std::size_t m = kBitsPer4D) {
  const double md = static_cast<double>(m);
  const double bits = shaping_rate ? 4.0 * *shaping_rate + (4.0 - md * (1.0 - ldpc_rate)) : md * ldpc_rate;
  return bits * symbol_rate_gbd * bch_rate;
}

}  // namespace hcss
