#pragma once

// Independent numerical verification: Monte Carlo integration of the step
// integrand over polycircles, the classical Mahler-measure height of a
// binomial hypersurface (all places), and a smoothed Monge-Ampere mass
// probe. Randomness is counter-based (Philox 4x32-10) keyed by
// (seed, stream, sample index), so results are reproducible bit for bit and
// independent of any parallel partitioning of the sample range.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "toric/arrangement.hpp"
#include "toric/config.hpp"
#include "toric/errors.hpp"
#include "toric/height.hpp"

namespace toric {

namespace rng {

inline constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
inline constexpr uint32_t kPhiloxM4x32A = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void philox_round(std::array<uint32_t, 4>& ctr, const std::array<uint32_t, 2>& key) {
    uint64_t p0 = static_cast<uint64_t>(kPhiloxM4x32A) * ctr[0];
    uint64_t p1 = static_cast<uint64_t>(kPhiloxM4x32B) * ctr[2];
    uint32_t lo0 = static_cast<uint32_t>(p0), hi0 = static_cast<uint32_t>(p0 >> 32);
    uint32_t lo1 = static_cast<uint32_t>(p1), hi1 = static_cast<uint32_t>(p1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

// Philox 4x32-10 block keyed by (seed, stream); counter is (sample, block).
inline std::array<uint32_t, 4> philox_block(uint64_t seed, uint32_t stream, uint64_t sample,
                                            uint32_t block) {
    std::array<uint32_t, 4> ctr = {static_cast<uint32_t>(sample),
                                   static_cast<uint32_t>(sample >> 32), block, stream};
    std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)};
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, key);
        key[0] += kPhiloxW32A;
        key[1] += kPhiloxW32B;
    }
    return ctr;
}

inline double uniform01(uint32_t x) { return (static_cast<double>(x) + 0.5) * 0x1p-32; }

// n uniform doubles for one (seed, stream, sample) triple
inline void uniforms(uint64_t seed, uint32_t stream, uint64_t sample, int n, double* out) {
    for (int b = 0; 4 * b < n; ++b) {
        auto blk = philox_block(seed, stream, sample, static_cast<uint32_t>(b));
        for (int j = 0; j < 4 && 4 * b + j < n; ++j) out[4 * b + j] = uniform01(blk[static_cast<size_t>(j)]);
    }
}

}  // namespace rng

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample std / sqrt(samples)
    long samples = 0;
    uint64_t seed = 0;
    long rejected = 0;  // singularity-guard rejections, resampled
};

namespace detail {

inline double to_double(const IVec& a, const std::vector<double>& x) {
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) s += mpz_get_d(a[j].get_mpz_t()) * x[j];
    return s;
}

}  // namespace detail

// Monte Carlo mean of the step integrand
//   log( |prod_i (t^{a_i})^{c_i} * (t_1 - 1)| / max_i |alpha_i t^{a_i}|^k )
// over the polycircle |t_j| = e^{s_j}, uniform phases. Samples landing
// within 1e-12 of the log singularity t_1 = 1 (possible only when
// |e^{s_1} - 1| < 1e-12) are rejected and redrawn deterministically.
inline MCEstimate mc_polycircle(const std::vector<double>& s, const IVec& c, const Int& k,
                                const PointConfig& cfg, const std::vector<double>& logAlpha,
                                long samples, uint64_t seed, uint32_t stream = 0,
                                double guard = 1e-12) {
    const int D = cfg.d;
    const size_t N = cfg.points.size();
    // moduli are fixed on the polycircle: hoist every log-modulus
    double constPart = 0.0;
    for (size_t i = 0; i < N; ++i)
        if (c[i] != 0) constPart += mpz_get_d(c[i].get_mpz_t()) * detail::to_double(cfg.points[i], s);
    double roofMax = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < N; ++i)
        roofMax = std::max(roofMax, logAlpha[i] + detail::to_double(cfg.points[i], s));
    constPart -= mpz_get_d(k.get_mpz_t()) * roofMax;

    const double r1 = std::exp(s.empty() ? 0.0 : s[0]);
    const bool nearUnit = std::abs(r1 - 1.0) < guard;
    MCEstimate est;
    est.samples = samples;
    est.seed = seed;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> u(static_cast<size_t>(D));
    for (long i = 0; i < samples; ++i) {
        double val;
        uint64_t draw = static_cast<uint64_t>(i);
        for (;;) {
            rng::uniforms(seed, stream, draw, D, u.data());
            double theta1 = 2.0 * M_PI * (D > 0 ? u[0] : 0.0);
            double re = r1 * std::cos(theta1) - 1.0, im = r1 * std::sin(theta1);
            double dist = std::sqrt(re * re + im * im);
            if ((nearUnit && dist < guard) || !std::isfinite(std::log(dist))) {
                ++est.rejected;
                draw += static_cast<uint64_t>(samples);  // deterministic redraw
                continue;
            }
            val = constPart + std::log(dist);
            break;
        }
        sum += val;
        sumsq += val * val;
    }
    est.mean = sum / static_cast<double>(samples);
    double var = std::max(0.0, sumsq / static_cast<double>(samples) - est.mean * est.mean);
    est.stderr_ = std::sqrt(var / static_cast<double>(samples));
    return est;
}

// Convenience overload evaluating an exact vertex produced by the engine.
template <TropicalScalar S>
MCEstimate mc_polycircle(const TropicalVertex<S>& v, const SectionData& sd, const PointConfig& cfg,
                         const std::vector<S>& logAlpha, long samples, uint64_t seed,
                         uint32_t stream = 0, double guard = 1e-12) {
    std::vector<double> s;
    for (const auto& x : v.coords) s.push_back(x.approx());
    std::vector<double> la;
    for (const auto& x : logAlpha) la.push_back(x.approx());
    return mc_polycircle(s, sd.c, sd.k, cfg, la, samples, seed, stream, guard);
}

// Classical canonical height of a binomial hypersurface, summed over all
// places: archimedean Mahler measure by Monte Carlo plus exact Gauss-norm
// terms at the finite places. Diagnostic oracle for the engine.
struct MahlerResult {
    MCEstimate arch;
    double finiteTerm = 0.0;
    double total = 0.0;
    Int u, v;  // coprime integer coefficients of u x^{m+} - v x^{m-}
    IVec w;    // kernel generator defining the binomial
};

inline MahlerResult mahler_hypersurface_height(const PointConfig& A, const Coefficients& alpha,
                                               long samples, uint64_t seed, uint32_t stream = 1) {
    const int n = A.n();
    if (n != A.d + 1)
        throw NotHypersurfaceError("mahler_hypersurface_height: codimension is not 1");
    auto gens = binomial_generators(A);
    if (gens.size() != 1) throw InternalError("mahler_hypersurface_height: expected one generator");
    const IVec w = gens[0].w();

    // twisted constant C with y^w = C on the orbit, y_i = (x_i/x_0)(alpha_0/alpha_i)
    Rat C(1);
    Int sumW = 0;
    for (int i = 0; i < n; ++i) {
        C *= rat_pow(alpha.values[static_cast<size_t>(i) + 1] / alpha.values[0], w[static_cast<size_t>(i)]);
        sumW += w[static_cast<size_t>(i)];
    }
    // f = Q * y^{w+} - P * y^{w-}, coprime integer coefficients
    Int u = C.get_den(), v = C.get_num();
    Int g;
    mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t());
    if (g != 1) throw InternalError("mahler_hypersurface_height: coefficients not coprime");

    // homogenized exponents over n+1 coordinates; x_0 powers balance degrees
    Int degP = 0, degM = 0;
    for (int i = 0; i < n; ++i) {
        if (w[static_cast<size_t>(i)] > 0) degP += w[static_cast<size_t>(i)];
        else degM -= w[static_cast<size_t>(i)];
    }
    Int maxDeg = std::max(degP, degM);
    std::vector<double> ep(static_cast<size_t>(n) + 1), em(static_cast<size_t>(n) + 1);
    ep[0] = mpz_get_d(Int(maxDeg - degP).get_mpz_t());
    em[0] = mpz_get_d(Int(maxDeg - degM).get_mpz_t());
    for (int i = 0; i < n; ++i) {
        const Int& wi = w[static_cast<size_t>(i)];
        ep[static_cast<size_t>(i) + 1] = wi > 0 ? mpz_get_d(wi.get_mpz_t()) : 0.0;
        em[static_cast<size_t>(i) + 1] = wi < 0 ? -mpz_get_d(wi.get_mpz_t()) : 0.0;
    }
    const double ud = mpz_get_d(u.get_mpz_t()), vd = mpz_get_d(v.get_mpz_t());

    MahlerResult res;
    res.u = u;
    res.v = v;
    res.w = w;
    res.arch.samples = samples;
    res.arch.seed = seed;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> th(static_cast<size_t>(n) + 1);
    for (long i = 0; i < samples; ++i) {
        double val;
        uint64_t draw = static_cast<uint64_t>(i);
        for (;;) {
            rng::uniforms(seed, stream, draw, n + 1, th.data());
            double phiP = 0.0, phiM = 0.0;
            for (int j = 0; j <= n; ++j) {
                phiP += ep[static_cast<size_t>(j)] * th[static_cast<size_t>(j)];
                phiM += em[static_cast<size_t>(j)] * th[static_cast<size_t>(j)];
            }
            phiP *= 2.0 * M_PI;
            phiM *= 2.0 * M_PI;
            double re = ud * std::cos(phiP) - vd * std::cos(phiM);
            double im = ud * std::sin(phiP) - vd * std::sin(phiM);
            double a = 0.5 * std::log(re * re + im * im);
            if (!std::isfinite(a)) {
                ++res.arch.rejected;
                draw += static_cast<uint64_t>(samples);
                continue;
            }
            val = a;
            break;
        }
        sum += val;
        sumsq += val * val;
    }
    res.arch.mean = sum / static_cast<double>(samples);
    double var = std::max(0.0, sumsq / static_cast<double>(samples) - res.arch.mean * res.arch.mean);
    res.arch.stderr_ = std::sqrt(var / static_cast<double>(samples));
    // finite places: log max(|u|_p, |v|_p); identically zero for coprime
    // integers, kept for clarity
    res.finiteTerm = 0.0;
    res.total = res.arch.mean + res.finiteTerm;
    return res;
}

// Total Monge-Ampere mass of the smoothed roof
//   g(x) = (1/p) log sum_i exp(p (log|alpha_i| + <a_i, x>)),
// estimated on a bounded box by jittered-grid quadrature of D! det Hess g
// with central finite differences. Compares against the toric degree.
inline MCEstimate mass_probe(const PointConfig& cfg, const std::vector<double>& logAlpha,
                             long samples, uint64_t seed, double p = 64.0) {
    const int D = cfg.d;
    if (D > 3) throw ValidationError("mass_probe: dimension above the d+1 <= 3 cost bound");
    const size_t N = cfg.points.size();
    double maxOff = 0.0;
    for (double la : logAlpha) maxOff = std::max(maxOff, std::abs(la));
    // box just wide enough that the gradient image covers the polytope; the
    // FD step must stay well under the 1/p transition width of the roof
    const double R = 3.0 + maxOff;
    const double h = 1.0 / (16.0 * p);

    auto lse = [&](const std::vector<double>& x) {
        double m = -std::numeric_limits<double>::infinity();
        std::vector<double> vals(N);
        for (size_t i = 0; i < N; ++i) {
            vals[i] = logAlpha[i] + detail::to_double(cfg.points[i], x);
            m = std::max(m, vals[i]);
        }
        double s = 0.0;
        for (size_t i = 0; i < N; ++i) s += std::exp(p * (vals[i] - m));
        return m + std::log(s) / p;
    };
    auto hessdet = [&](std::vector<double> x) {
        double g0 = lse(x);
        std::vector<std::vector<double>> H(static_cast<size_t>(D), std::vector<double>(static_cast<size_t>(D)));
        for (int i = 0; i < D; ++i) {
            x[static_cast<size_t>(i)] += h;
            double gp = lse(x);
            x[static_cast<size_t>(i)] -= 2 * h;
            double gm = lse(x);
            x[static_cast<size_t>(i)] += h;
            H[static_cast<size_t>(i)][static_cast<size_t>(i)] = (gp - 2 * g0 + gm) / (h * h);
        }
        for (int i = 0; i < D; ++i)
            for (int j = i + 1; j < D; ++j) {
                x[static_cast<size_t>(i)] += h;
                x[static_cast<size_t>(j)] += h;
                double gpp = lse(x);
                x[static_cast<size_t>(j)] -= 2 * h;
                double gpm = lse(x);
                x[static_cast<size_t>(i)] -= 2 * h;
                double gmm = lse(x);
                x[static_cast<size_t>(j)] += 2 * h;
                double gmp = lse(x);
                x[static_cast<size_t>(i)] += h;
                x[static_cast<size_t>(j)] -= h;
                H[static_cast<size_t>(i)][static_cast<size_t>(j)] = H[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                    (gpp - gpm - gmp + gmm) / (4 * h * h);
            }
        if (D == 1) return H[0][0];
        if (D == 2) return H[0][0] * H[1][1] - H[0][1] * H[1][0];
        return H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1]) -
               H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0]) +
               H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0]);
    };

    long grid = std::max(24L, static_cast<long>(std::floor(std::pow(static_cast<double>(samples), 1.0 / D))));
    long total = 1;
    for (int i = 0; i < D; ++i) total *= grid;
    double fact = 1.0;
    for (int i = 2; i <= D; ++i) fact *= i;
    const double cell = 2.0 * R / static_cast<double>(grid);
    const double boxVol = std::pow(2.0 * R, D);

    MCEstimate est;
    est.samples = total;
    est.seed = seed;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> x(static_cast<size_t>(D));
    std::vector<double> u(static_cast<size_t>(D));
    for (long idx = 0; idx < total; ++idx) {
        long t = idx;
        rng::uniforms(seed, 2, static_cast<uint64_t>(idx), D, u.data());
        for (int i = 0; i < D; ++i) {
            long gi = t % grid;
            t /= grid;
            x[static_cast<size_t>(i)] = -R + (static_cast<double>(gi) + u[static_cast<size_t>(i)]) * cell;
        }
        double f = fact * hessdet(x);
        sum += f;
        sumsq += f * f;
    }
    est.mean = sum / static_cast<double>(total) * boxVol;
    double var = std::max(0.0, sumsq / static_cast<double>(total) -
                                   (sum / static_cast<double>(total)) * (sum / static_cast<double>(total)));
    est.stderr_ = std::sqrt(var / static_cast<double>(total)) * boxVol;
    return est;
}

}  // namespace toric
