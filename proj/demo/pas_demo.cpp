// End-to-end walk through the library: codebook, PAS framing, PMF check and
// a short AWGN comparison against unshaped 64QAM.

#include <cstdio>
#include <random>

#include "hcss/hcss.hpp"

using namespace hcss;

int main() {
  const std::size_t L = 32, k = 56;
  const auto cb = build_codebook(AmplitudeAlphabet{}, L, k);
  const auto lut = build_lut<BigCount>(cb);
  std::printf("codebook L=%zu k=%zu: %zu compositions, rank table %zu bits\n", L, k, cb.size(), lut.storage_bits());

  // 2000 frames of random info bits through the 4D PAS chain and back
  std::mt19937_64 rng(1);
  BitString info(2000 * k);
  for (auto& b : info) b = rng() & 1;
  const auto frames = pas_assemble(info, cb, lut, 4, UniformSignSource(2));
  const auto back = pas_disassemble(frames, cb, lut, 4);
  std::printf("PAS round trip over %zu frames: %s\n", frames.size(), back == info ? "ok" : "MISMATCH");

  const auto pmf = pmf_1d(cb).to_double();
  std::vector<double> seen(4, 0.0);
  double total = 0;
  for (const auto& f : frames)
    for (const auto& s : f.symbols)
      for (int v : s) {
        seen[cb.alphabet().index_of(std::abs(v))] += 1;
        total += 1;
      }
  std::printf("amplitude  analytic  empirical\n");
  for (std::size_t i = 0; i < 4; ++i) std::printf("%9d  %.6f  %.6f\n", cb.alphabet()[i], pmf[i], seen[i] / total);

  const auto pmf4 = pmf_4d(cb);
  std::printf("H(X) = %.4f b/4D, rate loss = %.4f b/4D\n", signal_entropy_b4d(pmf4), rate_loss_b4d(pmf4, cb));

  SimConfig cfg;
  cfg.grid_db = {10.0, 13.0, 16.0};
  cfg.n_symbols = 200000;
  std::printf("\nsnr_db  uniform_air  hcss32_air  [b/4D]\n");
  cfg.scheme = Scheme::Uniform;
  const auto uni = run_awgn_sweep(cfg);
  cfg.scheme = Scheme::Hcss;
  const auto sh = run_awgn_sweep(cfg);
  for (std::size_t i = 0; i < uni.size(); ++i) {
    std::printf("%6.1f  %11.4f  %10.4f\n", uni[i].snr_db, uni[i].report.air_b4d, sh[i].report.air_b4d);
  }
  return back == info ? 0 : 1;
}
