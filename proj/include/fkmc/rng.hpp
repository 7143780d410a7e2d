#pragma once

#include <cmath>
#include <cstdint>

namespace fkmc {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011).
/// Key = master seed split into two 32-bit words; counter word 0/1 = path
/// index, words 2/3 = block counter. Each block yields four 32-bit words.
///
/// Normal variates: consecutive word pairs are packed into a 53-bit uniform
///   u = ((hi << 32 | lo) >> 11) + 0.5) * 2^-53  in (0,1)
/// and fed through Box-Muller:
///   z1 = sqrt(-2 ln u1) cos(2 pi u2),  z2 = sqrt(-2 ln u1) sin(2 pi u2).
/// Both values are consumed in order, so streams are reproducible across
/// platforms and worker counts.
class PathRng {
 public:
  PathRng(std::uint64_t master_seed, std::uint64_t path_index)
      : key0_(static_cast<std::uint32_t>(master_seed)),
        key1_(static_cast<std::uint32_t>(master_seed >> 32)),
        ctr0_(static_cast<std::uint32_t>(path_index)),
        ctr1_(static_cast<std::uint32_t>(path_index >> 32)) {}

  double uniform() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t bits = (hi << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint32_t next_u32() {
    if (word_pos_ == 4) {
      run_block();
      word_pos_ = 0;
    }
    return out_[word_pos_++];
  }

  static std::uint64_t mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    *hi = static_cast<std::uint32_t>(p >> 32);
    return static_cast<std::uint32_t>(p);
  }

  void run_block() {
    std::uint32_t c0 = ctr0_, c1 = ctr1_, c2 = block_lo_, c3 = block_hi_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, hi1;
      const std::uint32_t lo0 = static_cast<std::uint32_t>(mulhilo(0xD2511F53u, c0, &hi0));
      const std::uint32_t lo1 = static_cast<std::uint32_t>(mulhilo(0xCD9E8D57u, c2, &hi1));
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
    if (++block_lo_ == 0) ++block_hi_;
  }

  std::uint32_t key0_, key1_, ctr0_, ctr1_;
  std::uint32_t block_lo_ = 0, block_hi_ = 0;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int word_pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fkmc
