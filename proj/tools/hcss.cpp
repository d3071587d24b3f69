// hcss: command-line front end for the shaping library.
// Exit codes: 0 ok, 1 runtime error, 2 usage or configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hcss/hcss.hpp"

using namespace hcss;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError("bad " + what + " value '" + s + "'");
  return v;
}

// "a,b,c" or "start:step:stop" (stop included).
std::vector<double> parse_grid(const std::string& s, const std::string& what) {
  std::vector<double> out;
  const auto parts = split(s, ':');
  if (parts.size() == 3) {
    const double a = to_number(parts[0], what), step = to_number(parts[1], what), b = to_number(parts[2], what);
    if (!(step > 0) || b < a) throw UsageError(what + " range needs start <= stop and a positive step");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (n > 100000) throw UsageError(what + " range is too long");
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  if (parts.size() != 1) throw UsageError("bad " + what + " grid '" + s + "'");
  for (const auto& c : split(s, ',')) out.push_back(to_number(c, what));
  if (out.empty()) throw UsageError("empty " + what + " grid");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s, const std::string& what) {
  std::vector<std::size_t> out;
  for (double v : parse_grid(s, what)) {
    if (v < 1 || v != std::floor(v)) throw UsageError(what + " must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

AmplitudeAlphabet parse_alphabet(const std::string& s) {
  std::vector<int> levels;
  for (const auto& c : split(s, ',')) {
    const double v = to_number(c, "alphabet");
    if (v != std::floor(v)) throw UsageError("alphabet levels must be integers");
    levels.push_back(static_cast<int>(v));
  }
  return AmplitudeAlphabet(levels);
}

std::size_t bits_for(std::size_t length, std::optional<std::size_t> bits, std::optional<double> rate) {
  if (bits && rate) throw UsageError("give either --bits or --rate, not both");
  if (bits) return *bits;
  if (rate) {
    if (!(*rate > 0)) throw UsageError("--rate must be positive");
    return static_cast<std::size_t>(std::floor(*rate * static_cast<double>(length) + 1e-9));
  }
  throw UsageError("one of --bits or --rate is required");
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !os.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
}

// Writes to the file when a path is given, else to stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
  } else {
    write_file(path, text);
  }
}

// Shared options that pick a codebook: a saved file or build parameters.
struct CodebookArgs {
  std::string file;
  std::string alphabet = "1,3,5,7";
  std::size_t length = 0;
  std::optional<std::size_t> bits;
  std::optional<double> rate;

  void add(CLI::App* app, bool with_file) {
    if (with_file) app->add_option("--codebook", file, "Codebook file written by 'build'");
    app->add_option("--alphabet", alphabet, "Positive odd amplitude levels, comma separated")->capture_default_str();
    app->add_option("--length,-L", length, "Shaping sequence length L (amplitudes)");
    app->add_option("--bits,-k", bits, "Input bits per sequence k");
    app->add_option("--rate", rate, "Shaping rate R_S in b/Amp; k = floor(R_S * L)");
  }

  ShaperCodebook load() const {
    if (!file.empty()) {
      if (length || bits || rate) throw UsageError("--codebook excludes --length/--bits/--rate");
      std::ifstream is(file);
      if (!is) throw std::runtime_error("cannot open '" + file + "'");
      return read_codebook(is);
    }
    if (!length) throw UsageError("--length (or --codebook) is required");
    return build_codebook(parse_alphabet(alphabet), length, bits_for(length, bits, rate));
  }
};

// ---- build ----

struct BuildArgs {
  CodebookArgs cb;
  std::string out;
  bool lut = false;
};

int run_build(const BuildArgs& a) {
  const auto cb = a.cb.load();
  if (!a.out.empty()) write_file(a.out, codebook_to_string(cb));
  std::ostringstream os;
  os << "L=" << cb.length() << '\n'
     << "k=" << cb.bits() << '\n'
     << "R_S_b_per_amp=" << cb.shaping_rate_value() << '\n'
     << "entries=" << cb.size() << '\n'
     << "kraft_sum=" << cb.kraft_sum() << '\n'
     << "max_sequence_energy=" << cb.max_energy() << '\n';
  if (a.lut) {
    const auto lut = build_lut<BigCount>(cb);
    os << "lut_entries=" << lut.entry_count() << '\n'
       << "lut_value_bits=" << lut.value_bits() << '\n'
       << "lut_storage_bits=" << lut.storage_bits() << '\n';
  }
  std::cout << os.str();
  return 0;
}

// ---- analyze ----

struct AnalyzeArgs {
  CodebookArgs cb;
  std::string lengths;
  std::string dims = "1,2,4";
  std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
  std::vector<int> dims;
  for (auto d : parse_sizes(a.dims, "dims")) {
    if (d != 1 && d != 2 && d != 4) throw UsageError("--dims entries must be 1, 2 or 4");
    dims.push_back(static_cast<int>(d));
  }
  std::vector<ShaperCodebook> books;
  if (!a.lengths.empty()) {
    if (!a.cb.file.empty() || a.cb.length) throw UsageError("--lengths excludes --codebook and --length");
    if (a.cb.bits) throw UsageError("--lengths needs --rate, not --bits");
    if (!a.cb.rate) throw UsageError("--lengths needs --rate");
    for (auto L : parse_sizes(a.lengths, "lengths")) {
      books.push_back(build_codebook(parse_alphabet(a.cb.alphabet), L, bits_for(L, std::nullopt, a.cb.rate)));
    }
  } else {
    books.push_back(a.cb.load());
  }
  std::ostringstream os;
  os << "L,k,R_S,dim,entropy_b4D,rate_loss_b4D,avg_energy,power_penalty_db\n";
  char buf[256];
  for (const auto& cb : books) {
    const auto p1 = pmf_1d(cb).to_double();
    double energy = 0;
    for (std::size_t i = 0; i < p1.size(); ++i) energy += p1[i] * cb.alphabet().energy_of(i);
    const double penalty = power_penalty_db(energy, cb.shaping_rate_value());
    for (int d : dims) {
      if (cb.length() % static_cast<std::size_t>(d) != 0) continue;
      const auto pmf = pmf_nd(cb, d);
      const double h = signal_entropy_b4d(pmf);
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%d,%.6f,%.6f,%.6f,%.6f\n", cb.length(), cb.bits(),
                    cb.shaping_rate_value(), d, h, rate_loss_b4d(h, cb.shaping_rate_value()), energy, penalty);
      os << buf;
    }
  }
  emit(a.out, os.str());
  return 0;
}

// ---- encode / decode ----

struct CodecArgs {
  CodebookArgs cb;
  std::string in;
  std::string out;
};

int run_encode(const CodecArgs& a, bool decode) {
  const auto cb = a.cb.load();
  const auto shaper = make_shaper(cb);
  const auto data = read_file(a.in);
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
  const auto result = decode ? decode_bytes(cb, shaper, bytes) : encode_bytes(cb, shaper, bytes);
  write_file(a.out, std::string(result.begin(), result.end()));
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string scheme = "hcss";
  std::string alphabet = "1,3,5,7";
  std::size_t length = 32;
  std::optional<std::size_t> bits;
  std::optional<double> rate;
  int dim = 4;
  std::string snr;
  std::string osnr;
  double bw = 56.0;
  double symbols = 1e5;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  if (a.snr.empty() == a.osnr.empty()) throw UsageError("give exactly one of --snr or --osnr");
  SimConfig cfg;
  cfg.scheme = scheme_from_string(a.scheme);
  cfg.alphabet = parse_alphabet(a.alphabet);
  cfg.osnr_mode = !a.osnr.empty();
  cfg.grid_db = parse_grid(cfg.osnr_mode ? a.osnr : a.snr, cfg.osnr_mode ? "osnr" : "snr");
  cfg.bw_ghz = a.bw;
  if (!(a.symbols >= 0) || a.symbols != std::floor(a.symbols)) throw UsageError("--symbols must be an integer");
  cfg.n_symbols = static_cast<std::size_t>(a.symbols);
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.dim = a.dim;
  cfg.length = a.length;
  if (cfg.scheme == Scheme::Hcss) {
    cfg.bits = bits_for(a.length, a.bits, a.rate ? a.rate : std::optional<double>(1.75));
  } else {
    if (a.bits) throw UsageError("--bits applies to the hcss scheme only");
    cfg.shaping_rate = a.rate.value_or(1.75);
  }
  const auto points = run_awgn_sweep(cfg);
  std::ostringstream os;
  write_sweep_csv(os, points, cfg.osnr_mode);
  emit(a.out, os.str());
  return 0;
}

// ---- fit ----

struct FitArgs {
  std::string input;
  std::string btb;
  std::string grid;
  std::string out;
  bool measured_snr = false;
};

int run_fit(const FitArgs& a) {
  std::ifstream is(a.input);
  if (!is) throw std::runtime_error("cannot open '" + a.input + "'");
  const auto records = read_sweep_records(is);
  std::optional<BtbPoint> btb;
  if (!a.btb.empty()) {
    const auto parts = split(a.btb, ',');
    if (parts.size() != 3) throw UsageError("--btb takes osnr_db,eff_snr_db,bw_ghz");
    btb = BtbPoint{to_number(parts[0], "btb"), to_number(parts[1], "btb"), to_number(parts[2], "btb")};
  }
  const auto guess = initial_guess(records, btb);
  auto fit = fit_snr(records, guess);
  bool have_air = false;
  for (const auto& r : records) have_air = have_air || r.air_b4d.has_value();
  if (have_air) fit_air(records, fit, !a.measured_snr);
  const auto opt = optimal_power(fit);

  char buf[128];
  std::ostringstream os;
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.9g\n", key, v);
    os << buf;
  };
  kv("a_mw", fit.a);
  kv("b_per_mw2", fit.b);
  kv("c", fit.c);
  kv("rms_db", fit.rms_db);
  os << "iterations=" << fit.iterations << "\nconverged=" << (fit.converged ? "true" : "false") << '\n';
  os << "guess_clamped=" << (guess.clamped ? "true" : "false") << '\n';
  if (opt.unbounded) {
    os << "p_opt_dbm=inf\n";
  } else {
    kv("p_opt_dbm", mw_to_dbm(opt.power_mw));
  }
  kv("snr_opt_db", std::isinf(opt.snr) ? opt.snr : linear_to_db(opt.snr));
  if (fit.k_air) {
    kv("k_air_b4d_per_decade", *fit.k_air);
    kv("air_residual_b4d", fit.air_residual);
  }
  std::cout << os.str();
  if (!fit.converged) std::cerr << "warning: fit did not converge; best parameters reported\n";

  if (!a.out.empty()) {
    std::vector<double> grid;
    if (a.grid.empty()) {
      double lo = 1e300, hi = -1e300;
      for (const auto& r : records) {
        lo = std::min(lo, mw_to_dbm(r.power_mw));
        hi = std::max(hi, mw_to_dbm(r.power_mw));
      }
      for (int i = 0; i <= 100; ++i) grid.push_back(lo + (hi - lo) * i / 100.0);
    } else {
      grid = parse_grid(a.grid, "grid");
    }
    std::ostringstream curve;
    write_fit_curve_csv(curve, fit, grid);
    write_file(a.out, curve.str());
  }
  return 0;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::RankOutOfRange:
    case ErrorCode::UnknownComposition:
    case ErrorCode::FramingError:
    case ErrorCode::FrameCorrupt: return 1;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Huffman-coded sphere shaping for DP-64QAM: codebooks, codecs, analytics, AWGN sweeps, GN fits.\n"
               "Units: power in dBm, SNR/OSNR in dB, bandwidth in GHz, symbol rate in GBd, rates in b/Amp,\n"
               "information rates in b/4D."};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build a shaping codebook; prints a key=value summary");
  build.cb.add(b, true);
  b->add_option("--out,-o", build.out, "Codebook file to write");
  b->add_flag("--lut", build.lut, "Also build the rank table and report its storage in bits");
  b->footer("--rate is in b/Amp. Example: hcss build --length 32 --rate 1.75 --out cb32.txt");

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Rate loss, entropy and power penalty per mapping dimension (CSV)");
  analyze.cb.add(an, true);
  an->add_option("--lengths", analyze.lengths, "Grid of lengths L, e.g. 8,16,32 or 8:8:160 (needs --rate)");
  an->add_option("--dims", analyze.dims, "Mapping dimensions among 1,2,4")->capture_default_str();
  an->add_option("--out,-o", analyze.out, "CSV output (default stdout)");
  an->footer("CSV columns: L, k, R_S [b/Amp], dim, entropy_b4D [b/4D], rate_loss_b4D [b/4D],\n"
             "avg_energy [E(a^2) per amplitude], power_penalty_db [dB vs MB on all odd integers].");

  CodecArgs enc, dec;
  auto* e = app.add_subcommand("encode", "Shape a binary file: k input bits per word, L amplitude bytes out");
  enc.cb.add(e, true);
  e->add_option("--in,-i", enc.in, "Input file (bit count must be a multiple of k)")->required();
  e->add_option("--out,-o", enc.out, "Output file, one byte per amplitude level")->required();
  auto* d = app.add_subcommand("decode", "Invert 'encode'");
  dec.cb.add(d, true);
  d->add_option("--in,-i", dec.in, "Amplitude file (one byte per level)")->required();
  d->add_option("--out,-o", dec.out, "Recovered binary file")->required();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "AWGN Monte-Carlo sweep (CSV)");
  s->add_option("--scheme", sim.scheme, "uniform, mb or hcss")->capture_default_str();
  s->add_option("--alphabet", sim.alphabet, "Amplitude levels per quadrature")->capture_default_str();
  s->add_option("--length,-L", sim.length, "HCSS sequence length L")->capture_default_str();
  s->add_option("--bits,-k", sim.bits, "HCSS bits per sequence k");
  s->add_option("--rate", sim.rate, "Shaping rate in b/Amp (HCSS: k = floor(R_S L); MB: entropy target) [1.75]");
  s->add_option("--dim", sim.dim, "HCSS mapping dimension 1, 2 or 4")->capture_default_str();
  s->add_option("--snr", sim.snr, "SNR grid in dB: list a,b,c or range start:step:stop");
  s->add_option("--osnr", sim.osnr, "OSNR grid in dB (0.1 nm / 12.5 GHz reference), converted with --bw");
  s->add_option("--bw", sim.bw, "Signal bandwidth in GHz for OSNR conversion")->capture_default_str();
  s->add_option("--symbols,-n", sim.symbols, "4D symbols per grid point (>= 1e4)")->capture_default_str();
  s->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  s->add_option("--threads", sim.threads, "Worker threads; output does not depend on it")->capture_default_str();
  s->add_option("--out,-o", sim.out, "CSV output (default stdout)");
  s->footer("CSV columns: scheme, L, dim, R_S [b/Amp], snr_db|osnr_db [dB], eff_snr_db [dB], air_b4D [b/4D],\n"
            "ngmi, seed. L and dim are empty for uniform and mb.");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit 1/SNR = a/P + b P^2 + c to a launch-power sweep");
  f->add_option("--input,-i", fit.input, "CSV rows power_dbm [dBm], eff_snr_db [dB][, air_b4D [b/4D]]")->required();
  f->add_option("--btb", fit.btb, "Back-to-back point osnr_db,eff_snr_db,bw_ghz seeding c");
  f->add_option("--out,-o", fit.out, "Fitted-curve CSV: power_dbm [dBm], eff_snr_db [dB][, air_b4D [b/4D]]");
  f->add_option("--grid", fit.grid, "Power grid in dBm for --out (default: data span, 101 points)");
  f->add_flag("--measured-snr", fit.measured_snr, "Fit the AIR slope against measured rather than fitted SNR");
  f->footer("Prints a_mw [mW], b_per_mw2 [mW^-2], c, p_opt_dbm [dBm], snr_opt_db [dB], k_air [b/4D per decade].");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (b->parsed()) return run_build(build);
    if (an->parsed()) return run_analyze(analyze);
    if (e->parsed()) return run_encode(enc, false);
    if (d->parsed()) return run_encode(dec, true);
    if (s->parsed()) return run_simulate(sim);
    if (f->parsed()) return run_fit(fit);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code_for(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 2;
}
