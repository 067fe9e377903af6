#pragma once

#include <cmath>
#include <cstdint>

namespace neumann {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). Each path owns one generator whose state
// is derived from (base_seed, path_index), so batches are reproducible and
// independent of how paths are distributed over workers.
class Xoshiro256 {
  public:
    Xoshiro256(std::uint64_t base_seed, std::uint64_t stream) {
        std::uint64_t sm = base_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in (0,1]
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

// Ziggurat tables for the standard normal, 256 layers. The tail cutoff is
// solved at startup by bisection instead of hard-coding the usual constants.
class ZigguratTables {
  public:
    static const ZigguratTables& instance() {
        static ZigguratTables t;
        return t;
    }

    double x[258];
    double f[258];

  private:
    ZigguratTables() {
        double lo = 3.0, hi = 4.5;
        for (int it = 0; it < 200; ++it) {
            double r = 0.5 * (lo + hi);
            if (closure_defect(r) > 0.0)
                lo = r;
            else
                hi = r;
        }
        build(0.5 * (lo + hi));
    }

    static double pdf_exp(double v) { return std::exp(-0.5 * v * v); }

    static double tail_area(double r) {
        return std::sqrt(3.14159265358979323846 / 2.0) * std::erfc(r / std::sqrt(2.0));
    }

    // After stacking 255 rectangles of equal area on top of the base strip,
    // the top edge should land exactly on f = 1.
    static double closure_defect(double r) {
        double v = r * pdf_exp(r) + tail_area(r);
        double xi = r;
        for (int i = 1; i < 255; ++i) {
            double fi = v / xi + pdf_exp(xi);
            if (fi >= 1.0) return static_cast<double>(255 - i);
            xi = std::sqrt(-2.0 * std::log(fi));
        }
        return v / xi + pdf_exp(xi) - 1.0;
    }

    void build(double r) {
        double v = r * pdf_exp(r) + tail_area(r);
        x[0] = v / pdf_exp(r);
        x[1] = r;
        f[0] = 1.0;  // unused
        f[1] = pdf_exp(r);
        for (int i = 1; i < 256; ++i) {
            double fi = v / x[i] + pdf_exp(x[i]);
            x[i + 1] = (fi < 1.0) ? std::sqrt(-2.0 * std::log(fi)) : 0.0;
            f[i + 1] = pdf_exp(x[i + 1]);
        }
        x[256] = 0.0;
        f[256] = 1.0;
        x[257] = 0.0;
        f[257] = 1.0;
    }
};

// Per-path normal sampler.
class PathRng {
  public:
    PathRng(std::uint64_t base_seed, std::uint64_t path_index)
        : gen_(base_seed, path_index), tab_(ZigguratTables::instance()) {}

    double normal() {
        for (;;) {
            const std::uint64_t u = gen_.next();
            const int i = static_cast<int>(u & 255);
            // 53-bit uniform in [-1,1)
            const double uu = static_cast<double>(u >> 11) * 0x1.0p-52 - 1.0;
            const double xx = uu * tab_.x[i];
            if (std::fabs(xx) < tab_.x[i + 1]) return xx;
            if (i == 0) return tail(uu < 0.0);
            const double yy = tab_.f[i] + gen_.uniform_pos() * (tab_.f[i + 1] - tab_.f[i]);
            if (yy < std::exp(-0.5 * xx * xx)) return xx;
        }
    }

    double uniform_pos() { return gen_.uniform_pos(); }

  private:
    double tail(bool negative) {
        const double r = tab_.x[1];
        double xv, yv;
        do {
            xv = -std::log(gen_.uniform_pos()) / r;
            yv = -std::log(gen_.uniform_pos());
        } while (yv + yv < xv * xv);
        return negative ? -(r + xv) : (r + xv);
    }

    Xoshiro256 gen_;
    const ZigguratTables& tab_;
};

}  // namespace neumann
