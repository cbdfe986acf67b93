#pragma once

// Exact integer/rational linear algebra on top of GMP: row Hermite normal
// form with unimodular transform, saturated integer kernels, unimodular basis
// completion and canonical integer solves. Everything here is deterministic;
// the HNF conventions (positive pivots, entries above a pivot reduced into
// [0, pivot)) are relied on by the canonical-lambda rule downstream.

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "toric/errors.hpp"

namespace toric {

using Int = mpz_class;
using Rat = mpq_class;
using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;

struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Int> a;  // row-major

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c)) {}

    Int& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    IVec row(int i) const {
        IVec v(cols);
        for (int j = 0; j < cols; ++j) v[j] = at(i, j);
        return v;
    }

    static IntMatrix identity(int n) {
        IntMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(const std::vector<IVec>& rws, int ncols) {
        IntMatrix m(static_cast<int>(rws.size()), ncols);
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < ncols; ++j) m.at(i, j) = rws[static_cast<size_t>(i)][static_cast<size_t>(j)];
        return m;
    }

    IntMatrix transposed() const {
        IntMatrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    bool operator==(const IntMatrix& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

inline IntMatrix mul(const IntMatrix& A, const IntMatrix& B) {
    IntMatrix C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            if (A.at(i, k) == 0) continue;
            for (int j = 0; j < B.cols; ++j) C.at(i, j) += A.at(i, k) * B.at(k, j);
        }
    return C;
}

inline IVec mul_row(const IVec& v, const IntMatrix& M) {
    IVec r(M.cols);
    for (int i = 0; i < M.rows; ++i) {
        if (v[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; j < M.cols; ++j) r[static_cast<size_t>(j)] += v[static_cast<size_t>(i)] * M.at(i, j);
    }
    return r;
}

inline Int dot(const IVec& a, const IVec& b) {
    Int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Int gcd_vec(const IVec& v) {
    Int g = 0;
    for (const Int& x : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

inline bool is_zero_vec(const IVec& v) {
    for (const Int& x : v)
        if (x != 0) return false;
    return true;
}

struct HnfResult {
    IntMatrix H;                 // U * M, row Hermite form
    IntMatrix U;                 // unimodular transform
    int rank = 0;
    std::vector<int> pivotCols;  // strictly increasing, one per nonzero row
};

// Row Hermite normal form: pivots positive, zeros below each pivot, entries
// above a pivot reduced into [0, pivot). Zero matrix yields H = 0, U = I.
inline HnfResult hermite_normal_form(const IntMatrix& M) {
    HnfResult res;
    res.H = M;
    res.U = IntMatrix::identity(M.rows);
    IntMatrix& H = res.H;
    IntMatrix& U = res.U;

    auto swap_rows = [&](int i, int j) {
        if (i == j) return;
        for (int c = 0; c < H.cols; ++c) std::swap(H.at(i, c), H.at(j, c));
        for (int c = 0; c < U.cols; ++c) std::swap(U.at(i, c), U.at(j, c));
    };
    auto addmul_row = [&](int dst, int src, const Int& q) {
        if (q == 0) return;
        for (int c = 0; c < H.cols; ++c) H.at(dst, c) -= q * H.at(src, c);
        for (int c = 0; c < U.cols; ++c) U.at(dst, c) -= q * U.at(src, c);
    };
    auto negate_row = [&](int i) {
        for (int c = 0; c < H.cols; ++c) H.at(i, c) = -H.at(i, c);
        for (int c = 0; c < U.cols; ++c) U.at(i, c) = -U.at(i, c);
    };

    int r = 0;
    for (int c = 0; c < M.cols && r < M.rows; ++c) {
        // euclid on the column below row r until a single nonzero remains
        for (;;) {
            int best = -1;
            for (int i = r; i < H.rows; ++i) {
                if (H.at(i, c) == 0) continue;
                if (best < 0 || mpz_cmpabs(H.at(i, c).get_mpz_t(), H.at(best, c).get_mpz_t()) < 0) best = i;
            }
            if (best < 0) break;  // column clear below r
            swap_rows(r, best);
            bool reduced = true;
            for (int i = r + 1; i < H.rows; ++i) {
                if (H.at(i, c) == 0) continue;
                addmul_row(i, r, floor_div(H.at(i, c), H.at(r, c)));
                if (H.at(i, c) != 0) reduced = false;
            }
            if (reduced) break;
        }
        if (H.at(r, c) == 0) continue;
        if (H.at(r, c) < 0) negate_row(r);
        for (int i = 0; i < r; ++i) addmul_row(i, r, floor_div(H.at(i, c), H.at(r, c)));
        res.pivotCols.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

inline int rank_of(const IntMatrix& M) { return hermite_normal_form(M).rank; }

// Exact determinant via fraction-free-ish rational elimination.
inline Rat det_rational(const IntMatrix& M) {
    int n = M.rows;
    std::vector<QVec> m(static_cast<size_t>(n), QVec(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = Rat(M.at(i, j));
    Rat det = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) return Rat(0);
        if (piv != c) {
            std::swap(m[static_cast<size_t>(piv)], m[static_cast<size_t>(c)]);
            det = -det;
        }
        det *= m[static_cast<size_t>(c)][static_cast<size_t>(c)];
        for (int i = c + 1; i < n; ++i) {
            if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] == 0) continue;
            Rat f = m[static_cast<size_t>(i)][static_cast<size_t>(c)] / m[static_cast<size_t>(c)][static_cast<size_t>(c)];
            for (int j = c; j < n; ++j)
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * m[static_cast<size_t>(c)][static_cast<size_t>(j)];
        }
    }
    return det;
}

inline bool is_unimodular(const IntMatrix& M) {
    if (M.rows != M.cols) return false;
    Rat d = det_rational(M);
    return d == 1 || d == -1;
}

// Solve A x = b exactly over Q. Returns nullopt when the system is singular
// or inconsistent. A must be square here; callers needing least solutions go
// through the HNF route instead.
inline std::optional<QVec> solve_square_rational(const IntMatrix& A, const QVec& b) {
    int n = A.rows;
    std::vector<QVec> m(static_cast<size_t>(n), QVec(static_cast<size_t>(n) + 1));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = Rat(A.at(i, j));
        m[static_cast<size_t>(i)][static_cast<size_t>(n)] = b[static_cast<size_t>(i)];
    }
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) return std::nullopt;
        std::swap(m[static_cast<size_t>(piv)], m[static_cast<size_t>(c)]);
        Rat p = m[static_cast<size_t>(c)][static_cast<size_t>(c)];
        for (int j = c; j <= n; ++j) m[static_cast<size_t>(c)][static_cast<size_t>(j)] /= p;
        for (int i = 0; i < n; ++i) {
            if (i == c || m[static_cast<size_t>(i)][static_cast<size_t>(c)] == 0) continue;
            Rat f = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
            for (int j = c; j <= n; ++j)
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * m[static_cast<size_t>(c)][static_cast<size_t>(j)];
        }
    }
    QVec x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = m[static_cast<size_t>(i)][static_cast<size_t>(n)];
    return x;
}

// Inverse of a unimodular integer matrix, exact and integral.
inline IntMatrix inverse_unimodular(const IntMatrix& M) {
    int n = M.rows;
    IntMatrix inv(n, n);
    for (int j = 0; j < n; ++j) {
        QVec e(static_cast<size_t>(n));
        e[static_cast<size_t>(j)] = 1;
        auto col = solve_square_rational(M, e);
        if (!col) throw InternalError("inverse_unimodular: singular matrix");
        for (int i = 0; i < n; ++i) {
            const Rat& q = (*col)[static_cast<size_t>(i)];
            if (q.get_den() != 1) throw InternalError("inverse_unimodular: non-integral inverse");
            inv.at(i, j) = q.get_num();
        }
    }
    return inv;
}

// Basis of {w in Z^rows : w * M = 0}; rows of U matching zero rows of H.
// The result is a saturated lattice basis (it extends to a basis of Z^rows).
inline std::vector<IVec> integer_kernel(const IntMatrix& M) {
    HnfResult h = hermite_normal_form(M);
    std::vector<IVec> ker;
    for (int i = h.rank; i < M.rows; ++i) ker.push_back(h.U.row(i));
    if (!ker.empty()) {
        // canonicalize: HNF of the kernel matrix, rows keep positive leads
        HnfResult k = hermite_normal_form(IntMatrix::from_rows(ker, M.rows));
        ker.clear();
        for (int i = 0; i < k.rank; ++i) ker.push_back(k.H.row(i));
    }
    return ker;
}

// Basis of ker(tA) cap Z^n for an n x d matrix of rank d.
inline std::vector<IVec> saturated_kernel_basis(const IntMatrix& A) {
    HnfResult h = hermite_normal_form(A);
    if (h.rank < A.cols)
        throw RankDeficientError("saturated_kernel_basis: matrix rank " + std::to_string(h.rank) +
                                 " below column count " + std::to_string(A.cols));
    return integer_kernel(A);
}

// Completes a basis W of a saturated sublattice of Z^n to a basis of Z^n.
// Output rows start with W itself; the full matrix has determinant +-1.
inline std::vector<IVec> extend_to_unimodular_basis(const std::vector<IVec>& W, int n) {
    int m = static_cast<int>(W.size());
    std::vector<IVec> out = W;
    if (m == 0) {
        for (int i = 0; i < n; ++i) out.push_back(IntMatrix::identity(n).row(i));
        return out;
    }
    IntMatrix T = IntMatrix::from_rows(W, n).transposed();  // n x m
    HnfResult h = hermite_normal_form(T);
    if (h.rank < m) throw NotSaturatedError("extend_to_unimodular_basis: rows are not a lattice basis");
    // W * transpose(U) = [L | 0]; saturation forces |det L| = 1
    Int detL = 1;
    for (int i = 0; i < m; ++i) detL *= h.H.at(i, i);
    if (detL != 1 && detL != -1)
        throw NotSaturatedError("extend_to_unimodular_basis: sublattice is not saturated");
    IntMatrix Uinv = inverse_unimodular(h.U);
    // completion rows = last n-m rows of (transpose(U))^{-1} = columns of Uinv
    for (int j = m; j < n; ++j) {
        IVec c(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) c[static_cast<size_t>(i)] = Uinv.at(i, j);
        out.push_back(c);
    }
    return out;
}

// Canonical integer solution of  lambda * A = target  (row form of Eq-style
// systems): back-substitution through the HNF transform, free variables 0.
inline IVec solve_integer_row(const IntMatrix& A, const IVec& target) {
    HnfResult h = hermite_normal_form(A);
    IVec rem = target;
    IVec c(static_cast<size_t>(A.rows));
    for (int t = 0; t < h.rank; ++t) {
        int p = h.pivotCols[static_cast<size_t>(t)];
        Int q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rem[static_cast<size_t>(p)].get_mpz_t(),
                    h.H.at(t, p).get_mpz_t());
        if (r != 0) throw NotInLatticeError("solve_integer_row: target not in the row lattice");
        c[static_cast<size_t>(t)] = q;
        if (q != 0)
            for (int j = 0; j < A.cols; ++j) rem[static_cast<size_t>(j)] -= q * h.H.at(t, j);
    }
    if (!is_zero_vec(rem)) throw NotInLatticeError("solve_integer_row: target not in the row lattice");
    return mul_row(c, h.U);
}

}  // namespace toric
