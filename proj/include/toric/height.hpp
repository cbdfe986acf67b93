#pragma once

// The canonical-height recursion: build the chain of lifts ending at P^n,
// evaluate each step's closed form
//
//   h(X_A) = k * h(X_A') + log|alpha^pref| * deg(X_A') + sum_s deg_s * I_s
//
// with I_s = sum_i c_i <a'_i, s> + max(s_1, 0) - k * max_i(log|alpha_i| +
// <a'_i, s>), all terms exact scalars. Each step is evaluated on the
// saturated coordinates of its lift (section_data), which keeps the lattice
// hypothesis of the formula valid at every level; the terminal height is
// exactly zero. The alpha-basis exponent vector b with h = log|alpha^b| is
// solved canonically and its integrality recorded.

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toric/arrangement.hpp"
#include "toric/config.hpp"
#include "toric/log_linear.hpp"
#include "toric/polytope.hpp"

namespace toric {

struct ChainStep {
    int stepIndex = 0;
    PointConfig configA;
    PointConfig configLift;  // 0/1-coordinate lift of configA
    SectionData sd;
};

// successive lifts until the ambient rank reaches n (the chain ends at P^n)
inline std::vector<ChainStep> build_chain(const PointConfig& A) {
    std::vector<ChainStep> chain;
    PointConfig cur = A;
    int idx = 0;
    while (rank_of(cur.matrix()) < cur.n()) {
        ChainStep st;
        st.stepIndex = idx++;
        st.configA = cur;
        st.configLift = lift_config(cur);
        st.sd = section_data(cur, st.configLift);
        cur = st.configLift;
        chain.push_back(std::move(st));
    }
    return chain;
}

// Closed-form polycircle integral at one vertex: the c-monomial term, the
// Jensen mean of log|t_1 - 1| on |t_1| = e^{s_1}, and the roof maximum.
template <TropicalScalar S>
S vertex_contribution(const TropicalVertex<S>& v, const SectionData& sd, const PointConfig& cfg,
                      const std::vector<S>& logAlpha) {
    S acc = S::zero();
    for (size_t i = 0; i < cfg.points.size(); ++i)
        if (sd.c[i] != 0) acc += detail::inner_product(cfg.points[i], v.coords).scaled(Rat(sd.c[i]));
    if (sign_of(v.coords[0]) > 0) acc += v.coords[0];  // Jensen: max(s_1, 0)
    auto vals = roof_values(cfg, logAlpha, v.coords);
    S m = vals[0];
    for (size_t i = 1; i < vals.size(); ++i)
        if (sign_of(vals[i] - m) > 0) m = vals[i];
    acc -= m.scaled(Rat(sd.k));
    return acc;
}

template <TropicalScalar S>
struct StepEvaluation {
    CurrentMeasure<S> measure;      // on the saturated coordinates
    std::vector<S> contributions;   // one per atom, same order
    S prefactorLog = S::zero();     // log|alpha^pref|
    S stepHeight = S::zero();
};

// h = k * hNext + prefactor * deg(X_A') + sum_s mass_s * contribution_s
template <TropicalScalar S>
StepEvaluation<S> step_height(const ChainStep& st, const std::vector<S>& logAlpha, const S& hNext) {
    StepEvaluation<S> ev;
    ev.measure = current_measure(st.sd.satConfig, logAlpha);
    for (size_t i = 0; i < logAlpha.size(); ++i)
        if (st.sd.prefactorExp[i] != 0) ev.prefactorLog += logAlpha[i].scaled(Rat(st.sd.prefactorExp[i]));
    S h = hNext.scaled(Rat(st.sd.k));
    h += ev.prefactorLog.scaled(Rat(ev.measure.degree));
    for (const auto& atom : ev.measure.atoms) {
        S contrib = vertex_contribution(atom, st.sd, st.sd.satConfig, logAlpha);
        h += contrib.scaled(Rat(atom.localDegree));
        ev.contributions.push_back(std::move(contrib));
    }
    ev.stepHeight = std::move(h);
    return ev;
}

struct Finding {
    std::string kind;
    std::string detail;
};

struct HeightValue {
    LogLinearNumber inPrimes;
    bool hasAlphaBasis = false;
    QVec alphaBasis;          // b with h = sum b_i log|alpha_i|
    bool allIntegral = false; // Corollary check: b in Z^{n+1}
    std::pair<double, double> enclosure{0.0, 0.0};
};

struct HeightReport {
    PointConfig config;                       // validated input
    Coefficients alpha;
    std::vector<Binomial> generators;
    Int degree = 0;                           // deg X_{A,1}
    std::vector<ChainStep> chain;
    std::vector<StepEvaluation<LogLinearNumber>> evaluations;  // chain order
    std::vector<LogLinearNumber> stepHeights;                  // h(X_{A_j,alpha})
    std::optional<CurrentMeasure<LogLinearNumber>> rawTopMeasure;  // on the raw first lift
    HeightValue height;
    int degreeOverQ = 1;  // [K:Q] normalization carried explicitly
    std::vector<Finding> findings;
};

namespace detail {

// canonical rational solution of  b * V = target  (free variables zero);
// nullopt when the target is outside the rational row span
inline std::optional<QVec> solve_rational_row(const IntMatrix& V, const QVec& target) {
    HnfResult h = hermite_normal_form(V);
    QVec rem = target;
    QVec c(static_cast<size_t>(V.rows));
    for (int t = 0; t < h.rank; ++t) {
        int p = h.pivotCols[static_cast<size_t>(t)];
        Rat q = rem[static_cast<size_t>(p)] / Rat(h.H.at(t, p));
        c[static_cast<size_t>(t)] = q;
        if (q != 0)
            for (int j = 0; j < V.cols; ++j) rem[static_cast<size_t>(j)] -= q * Rat(h.H.at(t, j));
    }
    for (const Rat& r : rem)
        if (r != 0) return std::nullopt;
    QVec b(static_cast<size_t>(V.rows));
    for (int i = 0; i < V.rows; ++i)
        for (int j = 0; j < V.rows; ++j)
            b[static_cast<size_t>(j)] += c[static_cast<size_t>(i)] * Rat(h.U.at(i, j));
    return b;
}

}  // namespace detail

// Expresses h in the span of {log|alpha_i|}: integer solve first (the
// Corollary predicts b in Z^{n+1}), canonical rational solve as fallback.
inline void solve_alpha_basis(HeightValue& hv, const Coefficients& alpha,
                              std::vector<Finding>& findings) {
    std::set<Int> primes;
    std::vector<LogLinearNumber> logs;
    for (const Rat& a : alpha.values) {
        logs.push_back(LogLinearNumber::log_abs(a));
        for (const auto& [p, q] : logs.back().coeffs()) primes.insert(p);
    }
    for (const auto& [p, q] : hv.inPrimes.coeffs()) primes.insert(p);
    std::vector<Int> plist(primes.begin(), primes.end());
    int P = static_cast<int>(plist.size());
    int n1 = static_cast<int>(alpha.values.size());

    // log_abs of a rational always has integer prime exponents
    IntMatrix V(n1, P);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < P; ++j) {
            auto it = logs[static_cast<size_t>(i)].coeffs().find(plist[static_cast<size_t>(j)]);
            if (it == logs[static_cast<size_t>(i)].coeffs().end()) continue;
            if (it->second.get_den() != 1)
                throw InternalError("solve_alpha_basis: fractional factorization exponent");
            V.at(i, j) = it->second.get_num();
        }
    QVec target(static_cast<size_t>(P));
    bool integralTarget = true;
    for (int j = 0; j < P; ++j) {
        auto it = hv.inPrimes.coeffs().find(plist[static_cast<size_t>(j)]);
        if (it == hv.inPrimes.coeffs().end()) continue;
        target[static_cast<size_t>(j)] = it->second;
        if (it->second.get_den() != 1) integralTarget = false;
    }

    if (integralTarget) {
        IVec ti(static_cast<size_t>(P));
        for (int j = 0; j < P; ++j) ti[static_cast<size_t>(j)] = target[static_cast<size_t>(j)].get_num();
        try {
            IVec b = solve_integer_row(V, ti);
            hv.hasAlphaBasis = true;
            hv.allIntegral = true;
            hv.alphaBasis.assign(b.begin(), b.end());
        } catch (const NotInLatticeError&) {
            // fall through to the rational solve
        }
    }
    if (!hv.hasAlphaBasis) {
        auto b = detail::solve_rational_row(V, target);
        if (!b) {
            findings.push_back(
                {"span-failure", "height is not expressible in the span of log|alpha_i|"});
            return;
        }
        hv.hasAlphaBasis = true;
        hv.alphaBasis = *b;
        hv.allIntegral = true;
        for (const Rat& q : hv.alphaBasis)
            if (q.get_den() != 1) hv.allIntegral = false;
        if (!hv.allIntegral)
            findings.push_back({"non-integral-exponent",
                                "alpha-basis exponent vector b has non-integer entries; "
                                "counterexample candidate for the integrality corollary"});
    }
    // invariant: inPrimes = sum b_i log|alpha_i| exactly
    LogLinearNumber recon = LogLinearNumber::zero();
    for (size_t i = 0; i < logs.size(); ++i) recon += logs[i].scaled(hv.alphaBasis[i]);
    if (!(recon - hv.inPrimes).is_zero())
        throw InternalError("solve_alpha_basis: reconstructed combination disagrees with the height");
}

// Full exact-mode recursion. The input must already be validated.
inline HeightReport canonical_height(const PointConfig& A, const Coefficients& alpha) {
    HeightReport rep;
    rep.config = A;
    rep.alpha = alpha;
    rep.generators = binomial_generators(A);
    rep.degree = toric_degree(A);
    rep.chain = build_chain(A);

    std::vector<LogLinearNumber> logAlpha;
    for (const Rat& a : alpha.values) {
        if (a == 0) throw ZeroInputError("canonical_height: zero coefficient");
        logAlpha.push_back(LogLinearNumber::log_abs(a));
    }

    // downward recursion: terminal height of P^n is exactly zero
    LogLinearNumber h = LogLinearNumber::zero();
    rep.evaluations.resize(rep.chain.size());
    rep.stepHeights.assign(rep.chain.size() + 1, LogLinearNumber::zero());
    for (int j = static_cast<int>(rep.chain.size()) - 1; j >= 0; --j) {
        auto ev = step_height(rep.chain[static_cast<size_t>(j)], logAlpha, h);
        h = ev.stepHeight;
        rep.stepHeights[static_cast<size_t>(j)] = h;
        rep.evaluations[static_cast<size_t>(j)] = std::move(ev);
    }
    if (!rep.chain.empty())
        rep.rawTopMeasure = current_measure(rep.chain[0].configLift, logAlpha);

    for (const auto& st : rep.chain) {
        if (st.sd.latticeIndex != 1)
            rep.findings.push_back(
                {"lattice-index",
                 "step " + std::to_string(st.stepIndex) + ": lifted lattice has index " +
                     st.sd.latticeIndex.get_str() +
                     " in Z^{d+1}; evaluated in saturated coordinates (kappa = " +
                     st.sd.kappa.get_str() + ")"});
    }
    if (rep.rawTopMeasure && rep.rawTopMeasure->mergedDuplicates)
        rep.findings.push_back({"merged-duplicates",
                                "configuration has coinciding monomials |f_i| = |f_j|; exact "
                                "duplicates merged rather than perturbed"});

    rep.height.inPrimes = h;
    rep.height.enclosure = h.enclosure(128);
    solve_alpha_basis(rep.height, alpha, rep.findings);
    return rep;
}

// Float-mode variant: same pipeline over ApproxLog scalars; no prime basis,
// all exactness claims are approximate.
struct FloatHeightReport {
    PointConfig config;
    std::vector<double> alphaModuli;
    double height = 0.0;
    std::vector<double> stepHeights;
    std::vector<ChainStep> chain;
    std::vector<StepEvaluation<ApproxLog>> evaluations;
};

inline FloatHeightReport canonical_height_float(const PointConfig& A,
                                                const std::vector<double>& moduli) {
    FloatHeightReport rep;
    rep.config = A;
    rep.alphaModuli = moduli;
    rep.chain = build_chain(A);
    std::vector<ApproxLog> logAlpha;
    for (double m : moduli) {
        if (m == 0.0) throw ZeroInputError("canonical_height_float: zero modulus");
        logAlpha.push_back(ApproxLog(std::log(std::abs(m))));
    }
    ApproxLog h = ApproxLog::zero();
    rep.evaluations.resize(rep.chain.size());
    rep.stepHeights.assign(rep.chain.size() + 1, 0.0);
    for (int j = static_cast<int>(rep.chain.size()) - 1; j >= 0; --j) {
        auto ev = step_height(rep.chain[static_cast<size_t>(j)], logAlpha, h);
        h = ev.stepHeight;
        rep.stepHeights[static_cast<size_t>(j)] = h.approx();
        rep.evaluations[static_cast<size_t>(j)] = std::move(ev);
    }
    rep.height = h.approx();
    return rep;
}

}  // namespace toric
