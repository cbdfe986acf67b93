#pragma once

// The tropical hyperplane arrangement attached to a lifted configuration and
// coefficient moduli: hyperplanes <a'_i - a'_j, u> = log|alpha_j/alpha_i|,
// the vertex set of the tropical roof max_i(log|alpha_i| + <a'_i, u>), and
// the atomic Monge-Ampere measure with local toric degrees as masses.
//
// Vertices are found by enumerating (D+1)-subsets of indices whose tie locus
// is a point, then filtering by the active-at-max condition; this produces
// exactly the set the pairwise-hyperplane enumeration would, at far lower
// cost. Everything is exact in the scalar type S (LogLinearNumber in exact
// mode, ApproxLog in float mode).

#include <algorithm>
#include <optional>
#include <vector>

#include "toric/config.hpp"
#include "toric/errors.hpp"
#include "toric/log_linear.hpp"
#include "toric/polytope.hpp"

namespace toric {

template <TropicalScalar S>
struct TropicalHyperplane {
    int i = 0, j = 0;  // unordered pair, i < j
    IVec normal;       // a'_i - a'_j, nonzero
    S offset;          // log|alpha_j| - log|alpha_i|
};

template <TropicalScalar S>
struct TropicalVertex {
    std::vector<S> coords;                   // the point s
    std::vector<int> activeIndices;          // argmax of the roof at s
    std::vector<std::pair<int, int>> pairSet;  // I_s: active pairs through s
    std::vector<IVec> localPoints;           // A'_{I_s} (deduplicated)
    Int localDegree = 0;                     // deg X_{A'_{I_s},1}
    Int localIndex = 1;                      // lattice index of the local config, flagged when > 1
};

template <TropicalScalar S>
struct CurrentMeasure {
    std::vector<TropicalVertex<S>> atoms;
    Int totalMass = 0;
    Int degree = 0;                 // toric degree of the configuration
    bool mergedDuplicates = false;  // genericity |f_i| != |f_j| violated
};

// One hyperplane per unordered index pair with distinct exponent vectors;
// index 0 participates (a'_0 = 0 carries the constant function).
template <TropicalScalar S>
std::vector<TropicalHyperplane<S>> build_hyperplanes(const PointConfig& L,
                                                     const std::vector<S>& logAlpha) {
    std::vector<TropicalHyperplane<S>> out;
    int n = L.n();
    for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            IVec normal(static_cast<size_t>(L.d));
            bool nonzero = false;
            for (int t = 0; t < L.d; ++t) {
                normal[static_cast<size_t>(t)] = L.points[static_cast<size_t>(i)][static_cast<size_t>(t)] -
                                                 L.points[static_cast<size_t>(j)][static_cast<size_t>(t)];
                if (normal[static_cast<size_t>(t)] != 0) nonzero = true;
            }
            if (!nonzero) continue;  // duplicate exponent vectors merge upstream
            out.push_back(TropicalHyperplane<S>{
                i, j, std::move(normal),
                logAlpha[static_cast<size_t>(j)] - logAlpha[static_cast<size_t>(i)]});
        }
    return out;
}

namespace detail {

// Solve M s = rhs with M integer square and rhs scalars; Gauss-Jordan with
// rational pivots, scalar operations only scale by rationals. nullopt when
// the matrix is singular.
template <TropicalScalar S>
std::optional<std::vector<S>> solve_scalar_system(IntMatrix M, std::vector<S> rhs) {
    int n = M.rows;
    std::vector<QVec> m(static_cast<size_t>(n), QVec(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[static_cast<size_t>(i)][static_cast<size_t>(j)] = Rat(M.at(i, j));
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i)
            if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) return std::nullopt;
        std::swap(m[static_cast<size_t>(piv)], m[static_cast<size_t>(c)]);
        std::swap(rhs[static_cast<size_t>(piv)], rhs[static_cast<size_t>(c)]);
        Rat p = m[static_cast<size_t>(c)][static_cast<size_t>(c)];
        for (int j = 0; j < n; ++j) m[static_cast<size_t>(c)][static_cast<size_t>(j)] /= p;
        rhs[static_cast<size_t>(c)] = rhs[static_cast<size_t>(c)].scaled(Rat(1) / p);
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            Rat f = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f == 0) continue;
            for (int j = 0; j < n; ++j)
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * m[static_cast<size_t>(c)][static_cast<size_t>(j)];
            rhs[static_cast<size_t>(i)] -= rhs[static_cast<size_t>(c)].scaled(f);
        }
    }
    return rhs;
}

template <TropicalScalar S>
S inner_product(const IVec& a, const std::vector<S>& s) {
    S acc = S::zero();
    for (size_t j = 0; j < a.size(); ++j)
        if (a[j] != 0) acc += s[j].scaled(Rat(a[j]));
    return acc;
}

// exact lexicographic order on coordinate vectors, used for deterministic
// vertex ordering and deduplication
template <TropicalScalar S>
int compare_coords(const std::vector<S>& a, const std::vector<S>& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        int s = sign_of(a[i] - b[i]);
        if (s != 0) return s;
    }
    return 0;
}

}  // namespace detail

// Roof values log|alpha_i| + <a'_i, s> for all indices.
template <TropicalScalar S>
std::vector<S> roof_values(const PointConfig& L, const std::vector<S>& logAlpha,
                           const std::vector<S>& s) {
    std::vector<S> vals;
    vals.reserve(L.points.size());
    for (size_t i = 0; i < L.points.size(); ++i)
        vals.push_back(logAlpha[i] + detail::inner_product(L.points[i], s));
    return vals;
}

// All vertices of the tropical roof, exactly once, coordinates exact.
template <TropicalScalar S>
std::vector<TropicalVertex<S>> enumerate_vertices(const PointConfig& L,
                                                  const std::vector<S>& logAlpha) {
    const int D = L.d;
    const int N = L.n() + 1;
    std::vector<TropicalVertex<S>> found;
    if (N < D + 1) return found;

    std::vector<int> comb(static_cast<size_t>(D) + 1);
    for (int i = 0; i <= D; ++i) comb[static_cast<size_t>(i)] = i;
    while (true) {
        // tie locus of the chosen D+1 functions
        int i0 = comb[0];
        IntMatrix M(D, D);
        std::vector<S> rhs;
        rhs.reserve(static_cast<size_t>(D));
        bool degenerateRow = false;
        for (int t = 1; t <= D; ++t) {
            int it = comb[static_cast<size_t>(t)];
            bool nonzero = false;
            for (int j = 0; j < D; ++j) {
                M.at(t - 1, j) = L.points[static_cast<size_t>(it)][static_cast<size_t>(j)] -
                                 L.points[static_cast<size_t>(i0)][static_cast<size_t>(j)];
                if (M.at(t - 1, j) != 0) nonzero = true;
            }
            if (!nonzero) degenerateRow = true;
            rhs.push_back(logAlpha[static_cast<size_t>(i0)] - logAlpha[static_cast<size_t>(it)]);
        }
        if (!degenerateRow) {
            auto sol = detail::solve_scalar_system<S>(M, rhs);
            if (sol) {
                auto vals = roof_values(L, logAlpha, *sol);
                // global max and argmax, exact comparisons
                int best = 0;
                for (int i = 1; i < N; ++i)
                    if (sign_of(vals[static_cast<size_t>(i)] - vals[static_cast<size_t>(best)]) > 0) best = i;
                std::vector<int> argmax;
                for (int i = 0; i < N; ++i)
                    if (sign_of(vals[static_cast<size_t>(i)] - vals[static_cast<size_t>(best)]) == 0)
                        argmax.push_back(i);
                bool active = std::includes(argmax.begin(), argmax.end(), comb.begin(), comb.end());
                if (active) {
                    bool dup = false;
                    for (const auto& v : found)
                        if (detail::compare_coords(v.coords, *sol) == 0) {
                            dup = true;
                            break;
                        }
                    if (!dup) {
                        TropicalVertex<S> v;
                        v.coords = std::move(*sol);
                        v.activeIndices = std::move(argmax);
                        for (size_t x = 0; x < v.activeIndices.size(); ++x)
                            for (size_t y = x + 1; y < v.activeIndices.size(); ++y) {
                                int i = v.activeIndices[x], j = v.activeIndices[y];
                                if (L.points[static_cast<size_t>(i)] != L.points[static_cast<size_t>(j)])
                                    v.pairSet.emplace_back(i, j);
                            }
                        for (int i : v.activeIndices) v.localPoints.push_back(L.points[static_cast<size_t>(i)]);
                        v.localPoints = detail::dedupe_points(v.localPoints);
                        // an active tie locus pinned by a full-rank subset
                        // must itself span; anything else would hand mass to
                        // a positive-dimensional stratum
                        std::vector<IVec> diffs;
                        for (size_t t = 1; t < v.localPoints.size(); ++t) {
                            IVec r(static_cast<size_t>(D));
                            for (int j = 0; j < D; ++j)
                                r[static_cast<size_t>(j)] = v.localPoints[t][static_cast<size_t>(j)] -
                                                            v.localPoints[0][static_cast<size_t>(j)];
                            diffs.push_back(std::move(r));
                        }
                        if (rank_of(IntMatrix::from_rows(diffs, D)) != D)
                            throw DegenerateArrangementError(
                                "enumerate_vertices: active tie locus of positive dimension");
                        v.localDegree = normalized_volume_in_span(v.localPoints);
                        v.localIndex = lattice_index_in_span(v.localPoints);
                        found.push_back(std::move(v));
                    }
                }
            }
        }
        // next (D+1)-combination
        int i = D;
        while (i >= 0 && comb[static_cast<size_t>(i)] == N - (D + 1) + i) --i;
        if (i < 0) break;
        ++comb[static_cast<size_t>(i)];
        for (int j = i + 1; j <= D; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j) - 1] + 1;
    }
    std::sort(found.begin(), found.end(), [](const TropicalVertex<S>& a, const TropicalVertex<S>& b) {
        return detail::compare_coords(a.coords, b.coords) < 0;
    });
    return found;
}

// The current (dd^c roof)^{D}: one atom per vertex, mass = local degree.
// Mass balance against the configuration degree is enforced.
template <TropicalScalar S>
CurrentMeasure<S> current_measure(const PointConfig& L, const std::vector<S>& logAlpha) {
    CurrentMeasure<S> cm;
    cm.atoms = enumerate_vertices(L, logAlpha);
    cm.degree = normalized_volume_in_span(L.points);
    for (const auto& v : cm.atoms) cm.totalMass += v.localDegree;
    // genericity: exact duplicate functions (same exponent and same modulus)
    int n = L.n();
    for (int i = 0; i <= n && !cm.mergedDuplicates; ++i)
        for (int j = i + 1; j <= n; ++j)
            if (L.points[static_cast<size_t>(i)] == L.points[static_cast<size_t>(j)] &&
                sign_of(logAlpha[static_cast<size_t>(i)] - logAlpha[static_cast<size_t>(j)]) == 0) {
                cm.mergedDuplicates = true;
                break;
            }
    if (cm.totalMass != cm.degree)
        throw MassImbalanceError("current_measure: total mass " + cm.totalMass.get_str() +
                                 " != degree " + cm.degree.get_str());
    return cm;
}

}  // namespace toric
