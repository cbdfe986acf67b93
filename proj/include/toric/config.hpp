#pragma once

// Lattice point configurations and the GKZ toric machinery built on them:
// validation against the lattice-generation hypothesis, binomial ideal
// generators from saturated integer kernels, the lift A -> A' that realizes
// X_{A,1} as a hypersurface of X_{A',1}, and the section data (lambda row,
// homogenizing exponents c, section degree k) driving the height recursion.

#include <algorithm>
#include <set>
#include <vector>

#include "toric/errors.hpp"
#include "toric/int_matrix.hpp"

namespace toric {

struct PointConfig {
    int d = 0;                    // ambient lattice rank
    std::vector<IVec> points;     // a_0, ..., a_n

    int n() const { return static_cast<int>(points.size()) - 1; }

    // rows a_1 .. a_n (a_0 is the origin after validation)
    IntMatrix matrix() const {
        std::vector<IVec> rows(points.begin() + 1, points.end());
        return IntMatrix::from_rows(rows, d);
    }
};

struct Coefficients {
    QVec values;  // alpha_0, ..., alpha_n, all nonzero
};

struct Binomial {
    IVec wplus, wminus;  // disjoint supports, in N^n

    IVec w() const {
        IVec r(wplus.size());
        for (size_t i = 0; i < wplus.size(); ++i) r[i] = wplus[i] - wminus[i];
        return r;
    }
};

// true iff gcd(nu_1,...,nu_n) = 1, i.e. x^nu - 1 is irreducible in the
// Laurent ring over Z
inline bool is_irreducible_binomial(const IVec& nu) {
    if (is_zero_vec(nu)) throw ZeroVectorError("is_irreducible_binomial: zero exponent vector");
    return gcd_vec(nu) == 1;
}

// Translates so a_0 = 0 and checks that the differences generate Z^d.
// Throws RankDeficientError / LatticeNotGeneratedError (with the index).
inline PointConfig validate_config(const PointConfig& in) {
    if (in.points.empty()) throw ValidationError("validate_config: no points");
    for (const auto& p : in.points)
        if (static_cast<int>(p.size()) != in.d)
            throw ValidationError("validate_config: point dimension mismatch");
    PointConfig out;
    out.d = in.d;
    out.points.reserve(in.points.size());
    for (const auto& p : in.points) {
        IVec q(p.size());
        for (size_t j = 0; j < p.size(); ++j) q[j] = p[j] - in.points[0][j];
        out.points.push_back(std::move(q));
    }
    HnfResult h = hermite_normal_form(out.matrix());
    if (h.rank < out.d)
        throw RankDeficientError("validate_config: points span rank " + std::to_string(h.rank) +
                                 " < d = " + std::to_string(out.d));
    Int index = 1;
    for (int i = 0; i < h.rank; ++i) index *= h.H.at(i, h.pivotCols[static_cast<size_t>(i)]);
    if (index != 1) throw LatticeNotGeneratedError(index.get_si());
    return out;
}

// Generators x^{w+} = x^{w-} of the torus part of the ideal: the canonical
// HNF basis of ker(tA) cap Z^n, leads positive.
inline std::vector<Binomial> binomial_generators(const PointConfig& A) {
    auto ker = saturated_kernel_basis(A.matrix());
    std::vector<Binomial> out;
    for (const auto& w : ker) {
        if (!is_irreducible_binomial(w))
            throw InternalError("binomial_generators: kernel basis vector not primitive");
        Binomial b;
        b.wplus.resize(w.size());
        b.wminus.resize(w.size());
        for (size_t i = 0; i < w.size(); ++i) {
            if (w[i] > 0) b.wplus[i] = w[i];
            else b.wminus[i] = -w[i];
        }
        out.push_back(std::move(b));
    }
    return out;
}

// Smallest index j >= 1 whose lift raises the rank to d+1.
inline int lift_index(const PointConfig& A) {
    int n = A.n();
    for (int j = 1; j <= n; ++j) {
        std::vector<IVec> rows;
        rows.reserve(static_cast<size_t>(n));
        for (int i = 1; i <= n; ++i) {
            IVec v;
            v.reserve(static_cast<size_t>(A.d) + 1);
            v.push_back(i == j ? 1 : 0);
            for (const Int& x : A.points[static_cast<size_t>(i)]) v.push_back(x);
            rows.push_back(std::move(v));
        }
        if (rank_of(IntMatrix::from_rows(rows, A.d + 1)) == A.d + 1) return j;
    }
    throw CannotLiftError("lift_config: no index raises the rank (codimension 0?)");
}

// A' = { a'_0 = 0, a'_j* = (1, a_j*), a'_i = (0, a_i) } with deterministic j*.
inline PointConfig lift_config(const PointConfig& A) {
    int j = lift_index(A);
    PointConfig out;
    out.d = A.d + 1;
    out.points.reserve(A.points.size());
    for (int i = 0; i <= A.n(); ++i) {
        IVec v;
        v.reserve(static_cast<size_t>(A.d) + 1);
        v.push_back(i == j ? 1 : 0);
        for (const Int& x : A.points[static_cast<size_t>(i)]) v.push_back(x);
        out.points.push_back(std::move(v));
    }
    return out;
}

// Data of the section cutting X_{A,beta} inside X_{A',beta}.
//
// kappa is the least positive integer with (kappa, 0, ..., 0) in the lattice
// L_{A'} generated by a'_1..a'_n; lambda is the canonical integer row with
// sum_j lambda_j a'_j = kappa*e_1 (kappa = 1 whenever L_{A'} = Z^{d+1}).
// satBasisCols is a lattice basis of L_{A'} whose first vector is kappa*e_1;
// satPoints are the a'_j rewritten in that basis, which restores the
// standing hypothesis L = Z^{d+1} for the height recursion. The toric
// variety is unchanged (an injective affine identification).
struct SectionData {
    Int kappa = 1;
    Int latticeIndex = 1;            // [Z^{d+1} : L_{A'}]
    IVec lambda;                     // size n
    IVec c;                          // size n+1: c_0 .. c_n
    Int k = 0;                       // common degree of both section monomials
    IVec prefactorExp;               // size n+1: |sum lambda|, |lambda_j|  (theorem convention)
    Int prefSplitPlus = 0;           // max(0, sum lambda)   (section convention, trace only)
    Int prefSplitMinus = 0;          // max(0, -sum lambda)
    IntMatrix satBasisCols;          // (d+1) x (d+1), columns form the basis of L_{A'}
    PointConfig satConfig;           // points in the saturated coordinates
};

inline SectionData section_data(const PointConfig& A, const PointConfig& lift) {
    const int D = lift.d;
    const int n = lift.n();
    if (A.d + 1 != D || A.n() != n)
        throw ValidationError("section_data: configs are not a lift pair");
    IntMatrix M = lift.matrix();  // n x D
    HnfResult h = hermite_normal_form(M);
    if (h.rank != D) throw ValidationError("section_data: lifted config not of full rank");

    Int latticeIndex = 1;
    for (int i = 0; i < D; ++i) latticeIndex *= h.H.at(i, h.pivotCols[static_cast<size_t>(i)]);

    // rational back-substitution of e_1 over the HNF rows; kappa clears the
    // denominators, giving the least multiple of e_1 inside L_{A'}
    QVec rem(static_cast<size_t>(D));
    rem[0] = 1;
    QVec cq(static_cast<size_t>(n));
    for (int t = 0; t < D; ++t) {
        int p = h.pivotCols[static_cast<size_t>(t)];
        Rat q = rem[static_cast<size_t>(p)] / Rat(h.H.at(t, p));
        cq[static_cast<size_t>(t)] = q;
        if (q != 0)
            for (int j = 0; j < D; ++j) rem[static_cast<size_t>(j)] -= q * Rat(h.H.at(t, j));
    }
    for (const Rat& r : rem)
        if (r != 0) throw InternalError("section_data: e_1 escaped the rational row space");
    Int kappa = 1;
    for (const Rat& q : cq) mpz_lcm(kappa.get_mpz_t(), kappa.get_mpz_t(), q.get_den().get_mpz_t());
    IVec cInt(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) {
        Rat scaled = cq[static_cast<size_t>(t)] * Rat(kappa);
        cInt[static_cast<size_t>(t)] = scaled.get_num();
    }
    IVec lambda = mul_row(cInt, h.U);
    if (is_zero_vec(lambda)) throw InternalError("section_data: zero lambda row");

    SectionData sd;
    sd.kappa = kappa;
    sd.latticeIndex = latticeIndex;
    sd.lambda = lambda;

    Int sum = 0;
    for (const Int& l : lambda) sum += l;
    sd.c.assign(static_cast<size_t>(n) + 1, Int(0));
    sd.c[0] = sum < 0 ? -sum : Int(0);
    sd.prefSplitPlus = sum > 0 ? sum : Int(0);
    sd.prefSplitMinus = sd.c[0];
    Int k = sd.c[0];
    for (int j = 0; j < n; ++j) {
        const Int& l = lambda[static_cast<size_t>(j)];
        sd.c[static_cast<size_t>(j) + 1] = l < 0 ? -l : Int(0);
        if (l > 0) k += l;
    }
    sd.k = k;
    // both monomials of the section have the same degree: c_0 + sum max(0,l)
    // equals (c_0 + sum lambda) + sum max(0,-l) identically
    sd.prefactorExp.assign(static_cast<size_t>(n) + 1, Int(0));
    sd.prefactorExp[0] = sum < 0 ? -sum : sum;
    for (int j = 0; j < n; ++j) {
        const Int& l = lambda[static_cast<size_t>(j)];
        sd.prefactorExp[static_cast<size_t>(j) + 1] = l < 0 ? -l : l;
    }

    // basis of L_{A'} with kappa*e_1 first: extend the (primitive) HNF
    // coordinate vector of kappa*e_1 to a unimodular matrix, then map back
    std::vector<IVec> hRows;
    for (int i = 0; i < D; ++i) hRows.push_back(h.H.row(i));
    IntMatrix Hsq = IntMatrix::from_rows(hRows, D);
    IVec cFull(cInt.begin(), cInt.begin() + D);
    if (gcd_vec(cFull) != 1)
        throw InternalError("section_data: kappa*e_1 not primitive in L_{A'}");
    auto basisCoords = extend_to_unimodular_basis({cFull}, D);
    std::vector<IVec> basisRows;
    for (const auto& bc : basisCoords) basisRows.push_back(mul_row(bc, Hsq));
    IntMatrix B = IntMatrix::from_rows(basisRows, D).transposed();  // columns = basis vectors
    sd.satBasisCols = B;

    sd.satConfig.d = D;
    sd.satConfig.points.reserve(lift.points.size());
    for (const auto& p : lift.points) {
        QVec rhs(p.size());
        for (size_t j = 0; j < p.size(); ++j) rhs[j] = Rat(p[j]);
        auto sol = solve_square_rational(B, rhs);
        if (!sol) throw InternalError("section_data: singular lattice basis");
        IVec q(p.size());
        for (size_t j = 0; j < p.size(); ++j) {
            if ((*sol)[j].get_den() != 1)
                throw InternalError("section_data: lifted point outside its own lattice");
            q[j] = (*sol)[j].get_num();
        }
        sd.satConfig.points.push_back(std::move(q));
    }

    // invariant: lambda solves the saturated system with target e_1
    IVec check(static_cast<size_t>(D));
    for (int j = 1; j <= n; ++j)
        for (int t = 0; t < D; ++t)
            check[static_cast<size_t>(t)] +=
                lambda[static_cast<size_t>(j) - 1] * sd.satConfig.points[static_cast<size_t>(j)][static_cast<size_t>(t)];
    if (check[0] != 1) throw InternalError("section_data: lambda row does not cut the new coordinate");
    for (int t = 1; t < D; ++t)
        if (check[static_cast<size_t>(t)] != 0)
            throw InternalError("section_data: lambda row does not cut the new coordinate");
    return sd;
}

// --- torus parametrization, membership, retraction ------------------------

inline Rat rat_pow(const Rat& x, const Int& e) {
    if (e == 0) return Rat(1);
    Int a = e < 0 ? Int(-e) : e;
    Rat base = e < 0 ? Rat(1) / x : x;
    Rat r(1);
    unsigned long bits = mpz_sizeinbase(a.get_mpz_t(), 2);
    for (long i = static_cast<long>(bits) - 1; i >= 0; --i) {
        r *= r;
        if (mpz_tstbit(a.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) r *= base;
    }
    return r;
}

inline Rat monomial_value(const QVec& t, const IVec& expo) {
    Rat r(1);
    for (size_t j = 0; j < expo.size(); ++j)
        if (expo[j] != 0) r *= rat_pow(t[j], expo[j]);
    return r;
}

// [alpha_0 t^{a_0} : ... : alpha_n t^{a_n}]
inline QVec parametrize(const PointConfig& A, const Coefficients& alpha, const QVec& t) {
    for (const Rat& x : t)
        if (x == 0) throw ZeroTorusCoordinateError("parametrize: zero torus coordinate");
    QVec x(A.points.size());
    for (size_t i = 0; i < A.points.size(); ++i)
        x[i] = alpha.values[i] * monomial_value(t, A.points[i]);
    return x;
}

// torus-orbit membership: every twisted generator vanishes at x
inline bool membership(const PointConfig& A, const Coefficients& alpha, const QVec& x) {
    for (const Rat& xi : x)
        if (xi == 0) throw ZeroTorusCoordinateError("membership: coordinate off the dense orbit");
    int n = A.n();
    QVec y(static_cast<size_t>(n));  // y_i = (x_i/x_0) * (alpha_0/alpha_i)
    for (int i = 1; i <= n; ++i)
        y[static_cast<size_t>(i) - 1] =
            x[static_cast<size_t>(i)] / x[0] * alpha.values[0] / alpha.values[static_cast<size_t>(i)];
    for (const auto& b : binomial_generators(A)) {
        Rat lhs(1), rhs(1);
        for (int i = 0; i < n; ++i) {
            if (b.wplus[static_cast<size_t>(i)] != 0)
                lhs *= rat_pow(y[static_cast<size_t>(i)], b.wplus[static_cast<size_t>(i)]);
            if (b.wminus[static_cast<size_t>(i)] != 0)
                rhs *= rat_pow(y[static_cast<size_t>(i)], b.wminus[static_cast<size_t>(i)]);
        }
        if (lhs != rhs) return false;
    }
    return true;
}

// Monomial retraction psi: recovers t with t^{a_i} = x_i/x_0 from the lambda
// rows of e_i = sum_j lambda_ij a_j; the round trip with the parametrization
// is checked and NotOnOrbit is raised when it fails.
inline QVec retraction_check(const PointConfig& A, const QVec& x) {
    for (const Rat& xi : x)
        if (xi == 0) throw ZeroTorusCoordinateError("retraction_check: zero coordinate");
    int n = A.n();
    QVec y(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) y[static_cast<size_t>(i) - 1] = x[static_cast<size_t>(i)] / x[0];
    IntMatrix M = A.matrix();
    QVec t(static_cast<size_t>(A.d));
    for (int i = 0; i < A.d; ++i) {
        IVec e(static_cast<size_t>(A.d));
        e[static_cast<size_t>(i)] = 1;
        IVec lam = solve_integer_row(M, e);
        Rat v(1);
        for (int j = 0; j < n; ++j)
            if (lam[static_cast<size_t>(j)] != 0) v *= rat_pow(y[static_cast<size_t>(j)], lam[static_cast<size_t>(j)]);
        t[static_cast<size_t>(i)] = v;
    }
    for (int i = 1; i <= n; ++i)
        if (monomial_value(t, A.points[static_cast<size_t>(i)]) != y[static_cast<size_t>(i) - 1])
            throw NotOnOrbitError("retraction_check: point is not on the dense orbit");
    return t;
}

}  // namespace toric
