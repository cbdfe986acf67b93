#pragma once

// The exact scalar field for all tropical computations: rational linear
// combinations of logarithms of primes, with a certified interval enclosure.
// Zero is decided symbolically (empty coefficient map): the log p are
// linearly independent over Q, so a value is zero iff its map is empty.
// Nonzero signs are certified by MPFR interval refinement with directed
// rounding, doubling the working precision up to a configurable budget.

#include <gmpxx.h>
#include <mpfr.h>

#include <atomic>
#include <concepts>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "toric/errors.hpp"
#include "toric/int_matrix.hpp"

namespace toric {

// Refinement budget in bits for sign decisions; overridable via the
// TORIC_HEIGHT_BITS environment variable (see the CLI).
inline std::atomic<int>& refinement_budget_bits() {
    static std::atomic<int> bits{4096};
    return bits;
}

namespace detail {

struct MpfrInterval {
    mpfr_t lo, hi;
    explicit MpfrInterval(int bits) {
        mpfr_init2(lo, bits);
        mpfr_init2(hi, bits);
        mpfr_set_zero(lo, 1);
        mpfr_set_zero(hi, 1);
    }
    MpfrInterval(const MpfrInterval&) = delete;
    MpfrInterval& operator=(const MpfrInterval&) = delete;
    ~MpfrInterval() {
        mpfr_clear(lo);
        mpfr_clear(hi);
    }
};

// Memoized directed enclosures of log p. mpfr_log is correctly rounded, so
// rounding down/up yields true bounds.
class LogPrimeTable {
  public:
    static LogPrimeTable& instance() {
        static LogPrimeTable t;
        return t;
    }

    // writes the directed bounds for log(p) at the given precision
    void bounds(const Int& p, int bits, mpfr_t out_lo, mpfr_t out_hi) {
        std::lock_guard<std::mutex> g(mu_);
        Key k{p, bits};
        auto it = cache_.find(k);
        if (it == cache_.end()) {
            auto iv = std::make_unique<MpfrInterval>(bits);
            mpfr_t tmp;
            mpfr_init2(tmp, bits + 32);
            mpfr_set_z(tmp, p.get_mpz_t(), MPFR_RNDN);  // exact for desk-scale primes
            mpfr_log(iv->lo, tmp, MPFR_RNDD);
            mpfr_log(iv->hi, tmp, MPFR_RNDU);
            mpfr_clear(tmp);
            it = cache_.emplace(k, std::move(iv)).first;
        }
        mpfr_set(out_lo, it->second->lo, MPFR_RNDD);
        mpfr_set(out_hi, it->second->hi, MPFR_RNDU);
    }

  private:
    using Key = std::pair<Int, int>;
    std::mutex mu_;
    std::map<Key, std::unique_ptr<MpfrInterval>> cache_;
};

inline Int pollard_rho(const Int& n) {
    if (n % 2 == 0) return 2;
    Int x = 2, y = 2, d = 1, c = 1;
    while (true) {
        x = 2;
        y = 2;
        d = 1;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            Int diff = x - y;
            if (diff < 0) diff = -diff;
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != n) return d;
        c += 1;
    }
}

// signed prime factorization of |n|, n != 0
inline void factor_into(Int n, int mult, std::map<Int, Rat>& out) {
    if (n < 0) n = -n;
    for (Int p = 2; p <= 997 && n > 1; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            out[p] += mult;
            n /= p;
        }
    }
    while (n > 1) {
        if (mpz_probab_prime_p(n.get_mpz_t(), 32)) {
            out[n] += mult;
            break;
        }
        Int d = pollard_rho(n);
        factor_into(d, mult, out);
        n /= d;
    }
}

}  // namespace detail

class LogLinearNumber {
  public:
    LogLinearNumber() = default;

    static LogLinearNumber zero() { return LogLinearNumber(); }

    // log|q| for a nonzero rational, as signed prime exponents
    static LogLinearNumber log_abs(const Rat& q) {
        if (q == 0) throw ZeroInputError("log_abs: zero input");
        std::map<Int, Rat> m;
        if (q.get_num() != 1 && q.get_num() != -1) detail::factor_into(q.get_num(), +1, m);
        if (q.get_den() != 1) detail::factor_into(q.get_den(), -1, m);
        LogLinearNumber x;
        for (auto& [p, e] : m)
            if (e != 0) x.coeffs_.emplace(p, e);
        return x;
    }

    const std::map<Int, Rat>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    LogLinearNumber operator+(const LogLinearNumber& o) const {
        LogLinearNumber r = *this;
        for (const auto& [p, q] : o.coeffs_) {
            Rat& c = r.coeffs_[p];
            c += q;
            if (c == 0) r.coeffs_.erase(p);
        }
        return r;
    }

    LogLinearNumber operator-() const {
        LogLinearNumber r = *this;
        for (auto& [p, q] : r.coeffs_) q = -q;
        return r;
    }

    LogLinearNumber operator-(const LogLinearNumber& o) const { return *this + (-o); }

    LogLinearNumber scaled(const Rat& f) const {
        if (f == 0) return LogLinearNumber();
        LogLinearNumber r = *this;
        for (auto& [p, q] : r.coeffs_) q *= f;
        return r;
    }

    LogLinearNumber& operator+=(const LogLinearNumber& o) {
        *this = *this + o;
        return *this;
    }
    LogLinearNumber& operator-=(const LogLinearNumber& o) {
        *this = *this - o;
        return *this;
    }

    bool operator==(const LogLinearNumber& o) const { return coeffs_ == o.coeffs_; }

    // Exact sign. Zero is symbolic; nonzero is certified by interval
    // refinement and must resolve within the budget.
    int sign() const {
        if (coeffs_.empty()) return 0;
        int budget = refinement_budget_bits().load();
        for (int bits = 64; bits <= budget; bits *= 2) {
            int s = interval_sign(bits);
            if (s != 0) return s;
        }
        throw PrecisionExhaustedError(
            "sign_of: enclosure failed to separate a symbolically nonzero value from 0");
    }

    std::pair<double, double> enclosure(int bits = 128) const {
        detail::MpfrInterval acc(bits);
        accumulate(acc, bits);
        return {mpfr_get_d(acc.lo, MPFR_RNDD), mpfr_get_d(acc.hi, MPFR_RNDU)};
    }

    double approx() const {
        auto [lo, hi] = enclosure(96);
        return 0.5 * (lo + hi);
    }

    std::string to_string() const {
        if (coeffs_.empty()) return "0";
        std::string s;
        for (const auto& [p, q] : coeffs_) {
            if (!s.empty()) s += " + ";
            s += q.get_str() + "*log(" + p.get_str() + ")";
        }
        return s;
    }

  private:
    std::map<Int, Rat> coeffs_;

    void accumulate(detail::MpfrInterval& acc, int bits) const {
        detail::MpfrInterval lp(bits);
        mpfr_t term;
        mpfr_init2(term, bits);
        for (const auto& [p, q] : coeffs_) {
            detail::LogPrimeTable::instance().bounds(p, bits, lp.lo, lp.hi);
            bool pos = q > 0;
            mpfr_mul_q(term, pos ? lp.lo : lp.hi, q.get_mpq_t(), MPFR_RNDD);
            mpfr_add(acc.lo, acc.lo, term, MPFR_RNDD);
            mpfr_mul_q(term, pos ? lp.hi : lp.lo, q.get_mpq_t(), MPFR_RNDU);
            mpfr_add(acc.hi, acc.hi, term, MPFR_RNDU);
        }
        mpfr_clear(term);
    }

    int interval_sign(int bits) const {
        detail::MpfrInterval acc(bits);
        accumulate(acc, bits);
        if (mpfr_sgn(acc.lo) > 0) return 1;
        if (mpfr_sgn(acc.hi) < 0) return -1;
        return 0;
    }
};

inline int sign_of(const LogLinearNumber& x) { return x.sign(); }

inline const LogLinearNumber& max_scalar(const LogLinearNumber& a, const LogLinearNumber& b) {
    return sign_of(a - b) >= 0 ? a : b;
}

// --- float-mode scalar ---------------------------------------------------

// Drop-in scalar for float mode: extended-precision log-values, sign decided
// with a fixed tolerance. All exactness claims downstream are marked
// approximate.
struct ApproxLog {
    long double v = 0.0L;

    static constexpr long double kSignEps = 1e-9L;

    ApproxLog() = default;
    explicit ApproxLog(long double x) : v(x) {}

    static ApproxLog zero() { return ApproxLog(); }

    ApproxLog operator+(const ApproxLog& o) const { return ApproxLog(v + o.v); }
    ApproxLog operator-(const ApproxLog& o) const { return ApproxLog(v - o.v); }
    ApproxLog operator-() const { return ApproxLog(-v); }
    ApproxLog& operator+=(const ApproxLog& o) {
        v += o.v;
        return *this;
    }
    ApproxLog& operator-=(const ApproxLog& o) {
        v -= o.v;
        return *this;
    }
    ApproxLog scaled(const Rat& f) const {
        long double num = mpz_get_d(f.get_num().get_mpz_t());
        long double den = mpz_get_d(f.get_den().get_mpz_t());
        return ApproxLog(v * num / den);
    }
    int sign() const { return (v > kSignEps) - (v < -kSignEps); }
    bool is_zero() const { return sign() == 0; }
    double approx() const { return static_cast<double>(v); }
};

inline int sign_of(const ApproxLog& x) { return x.sign(); }

inline const ApproxLog& max_scalar(const ApproxLog& a, const ApproxLog& b) {
    return a.v >= b.v ? a : b;
}

template <class S>
concept TropicalScalar = requires(S a, S b, Rat q) {
    { S::zero() } -> std::same_as<S>;
    { a + b } -> std::same_as<S>;
    { a - b } -> std::same_as<S>;
    { -a } -> std::same_as<S>;
    { a.scaled(q) } -> std::same_as<S>;
    { sign_of(a) } -> std::same_as<int>;
    { a.approx() } -> std::same_as<double>;
};

}  // namespace toric
