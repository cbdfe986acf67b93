#pragma once

// Exact low-dimensional polytope machinery: brute-force facet enumeration
// with rational arithmetic, normalized lattice volumes via a recursive fan
// from the lexicographically smallest vertex, and the toric degree of a
// point configuration as the normalized volume taken inside the saturation
// of its affine span. Desk scale only (ambient dimension <= 8).

#include <algorithm>
#include <map>
#include <vector>

#include "toric/config.hpp"
#include "toric/errors.hpp"
#include "toric/int_matrix.hpp"

namespace toric {

struct LatticePolytope {
    int ambient = 0;             // ambient lattice rank
    int dim = 0;                 // affine dimension of the hull
    std::vector<IVec> vertices;  // irredundant, ambient coordinates
};

namespace detail {

struct Facet {
    IVec normal;              // primitive outer normal
    Int offset;               // <normal, x> = offset on the facet
    std::vector<int> points;  // indices of input points on the facet
};

inline std::vector<IVec> dedupe_points(const std::vector<IVec>& pts) {
    std::vector<IVec> out = pts;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Difference rows p_i - p_0.
inline IntMatrix difference_matrix(const std::vector<IVec>& pts, int m) {
    std::vector<IVec> rows;
    for (size_t i = 1; i < pts.size(); ++i) {
        IVec r(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) r[static_cast<size_t>(j)] = pts[i][static_cast<size_t>(j)] - pts[0][static_cast<size_t>(j)];
        rows.push_back(std::move(r));
    }
    return IntMatrix::from_rows(rows, m);
}

// Basis (rows) of the saturation of the affine span direction lattice.
inline std::vector<IVec> span_saturation_basis(const std::vector<IVec>& pts, int m) {
    IntMatrix D = difference_matrix(pts, m);
    // normals to the span, then the saturated lattice orthogonal to them
    std::vector<IVec> normals = integer_kernel(D.transposed());
    if (normals.empty()) {
        std::vector<IVec> basis;
        for (int i = 0; i < m; ++i) basis.push_back(IntMatrix::identity(m).row(i));
        return basis;
    }
    IntMatrix N = IntMatrix::from_rows(normals, m);
    return integer_kernel(N.transposed());
}

// Rewrites points in coordinates of the given saturated direction basis,
// translating pts[0] to the origin. Exact, integral by saturation.
inline std::vector<IVec> to_span_coordinates(const std::vector<IVec>& pts,
                                             const std::vector<IVec>& basis, int m) {
    int r = static_cast<int>(basis.size());
    IntMatrix Bt(m, r);  // columns = basis vectors
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < m; ++j) Bt.at(j, i) = basis[static_cast<size_t>(i)][static_cast<size_t>(j)];
    std::vector<IVec> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        // least squares is exact here: solve Bt * y = p - p0 via the normal
        // equations of a full-column-rank integer matrix
        IntMatrix G(r, r);
        IVec rhs(static_cast<size_t>(r));
        IVec diff(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j)
            diff[static_cast<size_t>(j)] = p[static_cast<size_t>(j)] - pts[0][static_cast<size_t>(j)];
        for (int i = 0; i < r; ++i) {
            for (int k = 0; k < r; ++k) G.at(i, k) = dot(basis[static_cast<size_t>(i)], basis[static_cast<size_t>(k)]);
            rhs[static_cast<size_t>(i)] = dot(basis[static_cast<size_t>(i)], diff);
        }
        QVec q(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i) q[static_cast<size_t>(i)] = Rat(rhs[static_cast<size_t>(i)]);
        auto sol = solve_square_rational(G, q);
        if (!sol) throw InternalError("to_span_coordinates: degenerate Gram matrix");
        IVec y(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i) {
            if ((*sol)[static_cast<size_t>(i)].get_den() != 1)
                throw InternalError("to_span_coordinates: point off the saturated span lattice");
            y[static_cast<size_t>(i)] = (*sol)[static_cast<size_t>(i)].get_num();
        }
        out.push_back(std::move(y));
    }
    return out;
}

// Supporting hyperplanes of a full-dimensional point set in Z^m, by brute
// force over m-subsets. m >= 1, points deduplicated.
inline std::vector<Facet> facets_full_dim(const std::vector<IVec>& pts, int m) {
    std::vector<Facet> out;
    std::map<std::pair<IVec, Int>, std::vector<int>> seen;
    int N = static_cast<int>(pts.size());
    std::vector<int> idx(static_cast<size_t>(m));
    // iterate over all m-subsets
    std::vector<int> comb(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) comb[static_cast<size_t>(i)] = i;
    if (N < m) return out;
    while (true) {
        // candidate hyperplane through pts[comb]
        std::vector<IVec> sub;
        for (int i : comb) sub.push_back(pts[static_cast<size_t>(i)]);
        IntMatrix D = difference_matrix(sub, m);
        auto ker = integer_kernel(D.transposed());
        if (ker.size() == 1) {
            IVec u = ker[0];
            Int c = dot(u, sub[0]);
            int below = 0, above = 0;
            for (const auto& p : pts) {
                Int v = dot(u, p);
                if (v < c) ++below;
                else if (v > c) ++above;
            }
            if (below == 0 || above == 0) {
                if (above > 0) {  // flip to outer normal
                    for (Int& x : u) x = -x;
                    c = -c;
                }
                auto key = std::make_pair(u, c);
                if (!seen.count(key)) {
                    std::vector<int> on;
                    for (int i = 0; i < N; ++i)
                        if (dot(u, pts[static_cast<size_t>(i)]) == c) on.push_back(i);
                    seen.emplace(key, on);
                }
            }
        }
        // next combination
        int i = m - 1;
        while (i >= 0 && comb[static_cast<size_t>(i)] == N - m + i) --i;
        if (i < 0) break;
        ++comb[static_cast<size_t>(i)];
        for (int j = i + 1; j < m; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j) - 1] + 1;
    }
    for (auto& [key, on] : seen) out.push_back(Facet{key.first, key.second, on});
    return out;
}

inline Int normalized_volume_full_dim(std::vector<IVec> pts, int m);

// Pyramid fan from the lex-min point over the facets avoiding it:
// vol = sum over facets F (lattice distance of apex) * vol_{m-1}(F).
inline Int normalized_volume_full_dim(std::vector<IVec> pts, int m) {
    pts = dedupe_points(pts);
    if (m == 0) return 1;
    if (m == 1) {
        Int lo = pts[0][0], hi = pts[0][0];
        for (const auto& p : pts) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        return hi - lo;
    }
    auto facets = facets_full_dim(pts, m);
    const IVec& apex = *std::min_element(pts.begin(), pts.end());
    Int vol = 0;
    for (const auto& f : facets) {
        Int dist = f.offset - dot(f.normal, apex);
        if (dist == 0) continue;
        std::vector<IVec> fpts;
        for (int i : f.points) fpts.push_back(pts[static_cast<size_t>(i)]);
        auto basis = span_saturation_basis(fpts, m);
        auto reduced = to_span_coordinates(fpts, basis, m);
        vol += dist * normalized_volume_full_dim(reduced, static_cast<int>(basis.size()));
    }
    return vol;
}

}  // namespace detail

// Exact convex hull; reports the affine dimension and the irredundant
// vertex set in ambient coordinates.
inline LatticePolytope convex_hull(const std::vector<IVec>& points) {
    if (points.empty()) throw ValidationError("convex_hull: no points");
    int m = static_cast<int>(points[0].size());
    auto pts = detail::dedupe_points(points);
    LatticePolytope P;
    P.ambient = m;
    if (pts.size() == 1) {
        P.dim = 0;
        P.vertices = pts;
        return P;
    }
    auto basis = detail::span_saturation_basis(pts, m);
    int r = static_cast<int>(basis.size());
    P.dim = r;
    auto reduced = detail::to_span_coordinates(pts, basis, m);
    if (r == 0) {
        P.vertices = {pts[0]};
        P.dim = 0;
        return P;
    }
    if (r == 1) {
        size_t lo = 0, hi = 0;
        for (size_t i = 1; i < reduced.size(); ++i) {
            if (reduced[i][0] < reduced[lo][0]) lo = i;
            if (reduced[i][0] > reduced[hi][0]) hi = i;
        }
        P.vertices = {pts[lo], pts[hi]};
        std::sort(P.vertices.begin(), P.vertices.end());
        return P;
    }
    auto facets = detail::facets_full_dim(reduced, r);
    for (size_t i = 0; i < reduced.size(); ++i) {
        std::vector<IVec> normals;
        for (const auto& f : facets)
            if (dot(f.normal, reduced[i]) == f.offset) normals.push_back(f.normal);
        if (normals.empty()) continue;
        if (rank_of(IntMatrix::from_rows(normals, r)) == r) P.vertices.push_back(pts[i]);
    }
    std::sort(P.vertices.begin(), P.vertices.end());
    return P;
}

// m! times the Euclidean volume, for a polytope of full dimension in its
// ambient lattice.
inline Int normalized_volume(const LatticePolytope& P) {
    if (P.dim != P.ambient)
        throw NotFullDimensionalError("normalized_volume: polytope not full-dimensional (dim " +
                                      std::to_string(P.dim) + " in Z^" + std::to_string(P.ambient) + ")");
    return detail::normalized_volume_full_dim(P.vertices, P.ambient);
}

// Normalized volume measured inside the saturation of the affine span;
// this is the degree of the abstract GKZ variety of the configuration.
inline Int normalized_volume_in_span(const std::vector<IVec>& points) {
    if (points.empty()) throw ValidationError("normalized_volume_in_span: no points");
    int m = static_cast<int>(points[0].size());
    auto pts = detail::dedupe_points(points);
    if (pts.size() == 1) return 1;
    auto basis = detail::span_saturation_basis(pts, m);
    auto reduced = detail::to_span_coordinates(pts, basis, m);
    return detail::normalized_volume_full_dim(reduced, static_cast<int>(basis.size()));
}

// Index of the difference lattice inside the saturation of its span; 1 for
// configurations satisfying the lattice-generation hypothesis. Values > 1
// are flagged in reports (the associated monomial parametrization is not
// birational onto its image).
inline Int lattice_index_in_span(const std::vector<IVec>& points) {
    int m = static_cast<int>(points[0].size());
    auto pts = detail::dedupe_points(points);
    if (pts.size() == 1) return 1;
    auto basis = detail::span_saturation_basis(pts, m);
    auto reduced = detail::to_span_coordinates(pts, basis, m);
    HnfResult h = hermite_normal_form(IntMatrix::from_rows(reduced, static_cast<int>(basis.size())));
    Int idx = 1;
    for (int i = 0; i < h.rank; ++i) idx *= h.H.at(i, h.pivotCols[static_cast<size_t>(i)]);
    return idx;
}

// deg X_{A,1} = normalized volume of conv(A); under the module hypothesis
// L_A = Z^d the span is full and this is the honest projective degree.
inline Int toric_degree(const PointConfig& A) { return normalized_volume_in_span(A.points); }

}  // namespace toric
