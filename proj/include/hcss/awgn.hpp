#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "hcss/codebook.hpp"
#include "hcss/codecs.hpp"
#include "hcss/demapper.hpp"
#include "hcss/error.hpp"
#include "hcss/maxwell_boltzmann.hpp"
#include "hcss/metrics.hpp"
#include "hcss/symbol_mapping.hpp"

namespace hcss {

inline constexpr double kOsnrReferenceGhz = 12.5;

// SNR_ASE = OSNR * 12.5 GHz / BW.
inline double osnr_to_snr_db(double osnr_db, double bw_ghz) {
  return osnr_db + 10.0 * std::log10(kOsnrReferenceGhz / bw_ghz);
}

inline double snr_to_osnr_db(double snr_db, double bw_ghz) {
  return snr_db - 10.0 * std::log10(kOsnrReferenceGhz / bw_ghz);
}

enum class Scheme { Uniform, Mb, Hcss };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Uniform: return "uniform";
    case Scheme::Mb: return "mb";
    case Scheme::Hcss: return "hcss";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "uniform") return Scheme::Uniform;
  if (s == "mb") return Scheme::Mb;
  if (s == "hcss") return Scheme::Hcss;
  throw Error(ErrorCode::ConfigInvalid, "unknown scheme '" + s + "'");
}

struct SimConfig {
  Scheme scheme = Scheme::Hcss;
  AmplitudeAlphabet alphabet;
  std::size_t length = 32;       // HCSS L
  std::size_t bits = 56;         // HCSS k
  int dim = 4;                   // HCSS mapping dimension
  double shaping_rate = 1.75;    // MB entropy target, b/Amp (HCSS uses k/L)
  std::vector<double> grid_db;   // SNR, or OSNR when osnr_mode
  bool osnr_mode = false;
  double bw_ghz = 56.0;
  std::size_t n_symbols = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  double rate() const {
    switch (scheme) {
      case Scheme::Uniform: return std::log2(static_cast<double>(alphabet.size()));
      case Scheme::Mb: return shaping_rate;
      case Scheme::Hcss: return static_cast<double>(bits) / static_cast<double>(length);
    }
    return 0.0;
  }

  void validate() const {
    if (n_symbols < 10000) throw Error(ErrorCode::ConfigInvalid, "n_symbols must be at least 10^4");
    if (grid_db.empty()) throw Error(ErrorCode::ConfigInvalid, "empty SNR grid");
    for (std::size_t i = 1; i < grid_db.size(); ++i) {
      if (!(grid_db[i] > grid_db[i - 1])) throw Error(ErrorCode::ConfigInvalid, "grid must be strictly increasing");
    }
    if (alphabet.size() > 16 || (alphabet.size() & (alphabet.size() - 1)) != 0) {
      throw Error(ErrorCode::ConfigInvalid, "alphabet size must be a power of two up to 16");
    }
    if (osnr_mode && !(bw_ghz > 0.0)) throw Error(ErrorCode::ConfigInvalid, "bandwidth must be positive");
    if (scheme == Scheme::Hcss) {
      if (dim != 1 && dim != 2 && dim != 4) throw Error(ErrorCode::ConfigInvalid, "mapping dimension must be 1, 2 or 4");
      if (length % static_cast<std::size_t>(dim) != 0) {
        throw Error(ErrorCode::ConfigInvalid, "L must be divisible by the mapping dimension");
      }
    }
    if (scheme == Scheme::Mb && !(shaping_rate > 0.0 && shaping_rate < std::log2(double(alphabet.size())))) {
      throw Error(ErrorCode::ConfigInvalid, "MB rate must lie inside (0, log2|A|)");
    }
  }
};

struct SweepPoint {
  Scheme scheme = Scheme::Hcss;
  std::size_t length = 0;
  int dim = 0;
  double shaping_rate = 0.0;
  double grid_db = 0.0;
  double snr_db = 0.0;  // configured channel SNR
  std::uint64_t seed = 0;
  MetricReport report;
};

// Amplitude source model shared by every grid point of a sweep.
class SymbolSource {
 public:
  explicit SymbolSource(const SimConfig& cfg) : cfg_(cfg) {
    const std::size_t n = cfg.alphabet.size();
    switch (cfg.scheme) {
      case Scheme::Uniform:
        quadrant_.assign(n * n * n * n, 1.0 / static_cast<double>(n * n * n * n));
        amp_pmf_.assign(n, 1.0 / static_cast<double>(n));
        entropy_b4d_ = 4.0 + 4.0 * std::log2(static_cast<double>(n));
        rate_loss_ = 0.0;
        break;
      case Scheme::Mb: {
        mb_ = fit_mb(cfg.shaping_rate, cfg.alphabet);
        amp_pmf_ = mb_->probabilities;
        quadrant_.resize(n * n * n * n);
        for (std::size_t c = 0; c < quadrant_.size(); ++c) {
          quadrant_[c] = amp_pmf_[c / (n * n * n)] * amp_pmf_[(c / (n * n)) % n] * amp_pmf_[(c / n) % n] *
                         amp_pmf_[c % n];
        }
        entropy_b4d_ = 4.0 + 4.0 * mb_->entropy_bits;
        rate_loss_ = 0.0;
        break;
      }
      case Scheme::Hcss: {
        codebook_ = std::make_shared<ShaperCodebook>(build_codebook(cfg.alphabet, cfg.length, cfg.bits));
        shaper_ = std::make_shared<AnyShaper>(make_shaper(*codebook_));
        const auto pmf = pmf_nd(*codebook_, cfg.dim);
        quadrant_ = quadrant_table(pmf);
        amp_pmf_ = pmf_1d(*codebook_).to_double();
        entropy_b4d_ = signal_entropy_b4d(pmf);
        rate_loss_ = rate_loss_b4d(entropy_b4d_, codebook_->shaping_rate_value());
        break;
      }
    }
    avg_energy_ = 0.0;
    for (std::size_t k = 0; k < n; ++k) avg_energy_ += amp_pmf_[k] * cfg.alphabet.energy_of(k);
  }

  const std::vector<double>& quadrant_prior() const noexcept { return quadrant_; }
  double entropy_b4d() const noexcept { return entropy_b4d_; }
  double rate_loss() const noexcept { return rate_loss_; }
  double avg_energy() const noexcept { return avg_energy_; }
  const ShaperCodebook* codebook() const noexcept { return codebook_.get(); }

  // n symbols as signed amplitude indices: component = (sign << 4) | k.
  std::vector<std::array<std::uint8_t, 4>> generate(std::size_t n, std::mt19937_64& rng) const {
    std::vector<std::array<std::uint8_t, 4>> out(n);
    std::uniform_int_distribution<unsigned> sign(0, 1);
    switch (cfg_.scheme) {
      case Scheme::Uniform: {
        std::uniform_int_distribution<unsigned> amp(0, static_cast<unsigned>(cfg_.alphabet.size() - 1));
        for (auto& s : out)
          for (auto& c : s) c = static_cast<std::uint8_t>((sign(rng) << 4) | amp(rng));
        break;
      }
      case Scheme::Mb: {
        std::discrete_distribution<unsigned> amp(amp_pmf_.begin(), amp_pmf_.end());
        for (auto& s : out)
          for (auto& c : s) c = static_cast<std::uint8_t>((sign(rng) << 4) | amp(rng));
        break;
      }
      case Scheme::Hcss: generate_hcss(out, rng); break;
    }
    return out;
  }

 private:
  void generate_hcss(std::vector<std::array<std::uint8_t, 4>>& out, std::mt19937_64& rng) const {
    const int dim = cfg_.dim;
    const std::size_t lanes = lanes_for(dim);
    const std::size_t len = codebook_->length();
    const std::size_t slots = len / static_cast<std::size_t>(dim);
    std::vector<std::uint8_t> seqs(lanes * len);
    std::uniform_int_distribution<unsigned> sign(0, 1);
    std::visit(
        [&](const auto& shaper) {
          using Word = typename std::decay_t<decltype(shaper)>::word_type;
          for (std::size_t t0 = 0; t0 < out.size(); t0 += slots) {
            for (std::size_t l = 0; l < lanes; ++l) {
              shaper.encode(random_word<Word>(codebook_->bits(), rng),
                            std::span<std::uint8_t>(seqs).subspan(l * len, len));
            }
            for (std::size_t t = 0; t < slots && t0 + t < out.size(); ++t) {
              for (std::size_t q = 0; q < 4; ++q) {
                const auto k = seqs[lane_of(dim, q) * len + lane_position(dim, t, q)];
                out[t0 + t][q] = static_cast<std::uint8_t>((sign(rng) << 4) | k);
              }
            }
          }
        },
        *shaper_);
  }

  SimConfig cfg_;
  std::vector<double> quadrant_;
  std::vector<double> amp_pmf_;
  double entropy_b4d_ = 0.0;
  double rate_loss_ = 0.0;
  double avg_energy_ = 0.0;
  std::optional<MbDistribution> mb_;
  std::shared_ptr<ShaperCodebook> codebook_;
  std::shared_ptr<AnyShaper> shaper_;
};

namespace detail {

inline double signed_level(const AmplitudeAlphabet& a, std::uint8_t c) {
  const double v = a[c & 0x0f];
  return (c >> 4) ? -v : v;
}

// Index into a per-quadrature centroid table: s*n + k.
inline std::size_t centroid_slot(std::uint8_t c, std::size_t n) { return (c >> 4) * n + (c & 0x0f); }

}  // namespace detail

// One grid point: source, per-dimension Gaussian noise scaled to the measured
// signal power, per-quadrature centroids, effective SNR, exact demapping, AIR.
inline SweepPoint simulate_point(const SimConfig& cfg, const SymbolSource& source, std::size_t index) {
  const double grid = cfg.grid_db.at(index);
  const double snr_db = cfg.osnr_mode ? osnr_to_snr_db(grid, cfg.bw_ghz) : grid;
  const std::size_t n = cfg.alphabet.size();
  const std::uint64_t point_seed = cfg.seed;
  auto src_rng = make_rng(point_seed, 2 * index);
  const auto tx = source.generate(cfg.n_symbols, src_rng);

  long double es = 0;
  for (const auto& s : tx)
    for (auto c : s) {
      const double v = detail::signed_level(cfg.alphabet, c);
      es += v * v;
    }
  es /= static_cast<long double>(tx.size());
  const double per_dim_sigma = std::sqrt(static_cast<double>(es) / (4.0 * db_to_linear(snr_db)));

  // Pass 1: centroid statistics; the noise stream is replayed in pass 2.
  std::array<std::vector<long double>, 4> sum, sumsq;
  std::array<std::vector<std::uint64_t>, 4> count;
  for (std::size_t q = 0; q < 4; ++q) {
    sum[q].assign(2 * n, 0);
    sumsq[q].assign(2 * n, 0);
    count[q].assign(2 * n, 0);
  }
  {
    auto noise_rng = make_rng(point_seed, 2 * index + 1);
    std::normal_distribution<double> noise(0.0, per_dim_sigma);
    for (const auto& s : tx) {
      for (std::size_t q = 0; q < 4; ++q) {
        const double y = detail::signed_level(cfg.alphabet, s[q]) + noise(noise_rng);
        const auto slot = detail::centroid_slot(s[q], n);
        sum[q][slot] += y;
        sumsq[q][slot] += static_cast<long double>(y) * y;
        ++count[q][slot];
      }
    }
  }
  std::array<std::vector<double>, 4> centroids;
  long double sig = 0, err = 0;
  const long double total = static_cast<long double>(tx.size());
  for (std::size_t q = 0; q < 4; ++q) {
    centroids[q].resize(2 * n);
    long double mean = 0, second = 0;
    for (std::size_t j = 0; j < 2 * n; ++j) {
      const double nominal = (j >= n ? -1.0 : 1.0) * cfg.alphabet[j % n];
      if (count[q][j] == 0) {
        centroids[q][j] = nominal;
        continue;
      }
      const long double c = sum[q][j] / static_cast<long double>(count[q][j]);
      centroids[q][j] = static_cast<double>(c);
      mean += c * count[q][j];
      second += c * c * count[q][j];
      err += sumsq[q][j] - c * c * count[q][j];
    }
    sig += second - mean * mean / total;
  }
  const double cap = db_to_linear(kSnrCapDb);
  const double snr_eff = (err <= 0 || sig / err > cap) ? cap : static_cast<double>(sig / err);
  const double residual_total = static_cast<double>(std::max<long double>(err, 0) / total);
  const double sigma2 = std::max(aux_noise_variance(residual_total), 1e-300);

  // Pass 2: demap and accumulate bit metrics.
  SeparableDemapper4D demapper(n, source.quadrant_prior(), centroids, sigma2);
  const std::size_t m = demapper.bits_per_symbol();
  const std::size_t amp_bits = m / 4 - 1;
  BitMetricAccumulator acc;
  {
    auto noise_rng = make_rng(point_seed, 2 * index + 1);
    std::normal_distribution<double> noise(0.0, per_dim_sigma);
    std::vector<double> llrs(m);
    std::vector<std::uint8_t> bits(m);
    for (const auto& s : tx) {
      Point4 y{};
      for (std::size_t q = 0; q < 4; ++q) {
        y[q] = detail::signed_level(cfg.alphabet, s[q]) + noise(noise_rng);
        const unsigned k = s[q] & 0x0f;
        const unsigned label = component_label(k, (s[q] >> 4) != 0, amp_bits);
        for (std::size_t b = 0; b <= amp_bits; ++b) bits[q * (amp_bits + 1) + b] = (label >> (amp_bits - b)) & 1u;
      }
      demapper.demap(y, llrs);
      acc.add_symbol(llrs, bits);
    }
  }

  SweepPoint p;
  p.scheme = cfg.scheme;
  p.length = cfg.scheme == Scheme::Hcss ? cfg.length : 0;
  p.dim = cfg.scheme == Scheme::Hcss ? cfg.dim : 0;
  p.shaping_rate = cfg.rate();
  p.grid_db = grid;
  p.snr_db = snr_db;
  p.seed = cfg.seed;
  auto& r = p.report;
  r.entropy_b4d = source.entropy_b4d();
  r.rate_loss_b4d = source.rate_loss();
  r.air_b4d = air_bmd(acc.conditional_entropy(), r.entropy_b4d, r.rate_loss_b4d);
  r.ngmi = ngmi(r.air_b4d, cfg.scheme != Scheme::Uniform, p.shaping_rate, m);
  r.effective_snr_db = linear_to_db(snr_eff);
  r.avg_energy = source.avg_energy();
  r.power_penalty_db = power_penalty_db(r.avg_energy, p.shaping_rate);
  return p;
}

// Grid points run as independent jobs; each draws from streams derived from
// (seed, grid index), so the output does not depend on the thread count.
inline std::vector<SweepPoint> run_awgn_sweep(const SimConfig& cfg) {
  cfg.validate();
  const SymbolSource source(cfg);
  std::vector<SweepPoint> out(cfg.grid_db.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(out.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = simulate_point(cfg, source, i);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < out.size(); i += workers) out[i] = simulate_point(cfg, source, i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points, bool osnr_mode,
                            bool header = true) {
  if (header) {
    os << "scheme,L,dim,R_S," << (osnr_mode ? "osnr_db" : "snr_db") << ",eff_snr_db,air_b4D,ngmi,seed\n";
  }
  char buf[256];
  for (const auto& p : points) {
    // L and dim are left empty for the unshaped and MB references
    std::string shape = ",";
    if (p.scheme == Scheme::Hcss) shape = std::to_string(p.length) + "," + std::to_string(p.dim);
    std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.4f,%.6f,%.6f,%.6f,%llu\n", to_string(p.scheme).c_str(),
                  shape.c_str(), p.shaping_rate, p.grid_db, p.report.effective_snr_db, p.report.air_b4d, p.report.ngmi,
                  static_cast<unsigned long long>(p.seed));
    os << buf;
  }
}

}  // namespace hcss
