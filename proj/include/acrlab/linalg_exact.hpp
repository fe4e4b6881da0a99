#pragma once

#include <numeric>
#include <vector>

#include "acrlab/rational.hpp"

namespace acrlab {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

/// Row echelon form in place; returns the rank. Rows are kept reduced
/// (leading entry 1, zeros above and below).
inline int row_reduce(RatMat& m) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c].is_zero()) ++piv;
        if (piv == rows) continue;
        std::swap(m[r], m[piv]);
        Rational lead = m[r][c];
        for (auto& v : m[r]) v /= lead;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return (int)r;
}

/// Scale a rational vector to a primitive integer vector (gcd 1, first nonzero > 0).
inline std::vector<std::int64_t> to_primitive_integer(const RatVec& v) {
    std::int64_t lcm = 1;
    for (const auto& x : v) lcm = std::lcm(lcm, x.den());
    std::vector<std::int64_t> out;
    std::int64_t g = 0;
    for (const auto& x : v) {
        std::int64_t n = x.num() * (lcm / x.den());
        out.push_back(n);
        g = std::gcd(g, n < 0 ? -n : n);
    }
    if (g > 1)
        for (auto& n : out) n /= g;
    for (auto n : out) {
        if (n != 0) {
            if (n < 0)
                for (auto& y : out) y = -y;
            break;
        }
    }
    return out;
}

/// Basis of the null space of m (vectors v with m v = 0), as rows.
inline RatMat null_space(RatMat m) {
    if (m.empty()) return {};
    std::size_t cols = m[0].size();
    row_reduce(m);
    std::vector<int> pivot_col_of_row;
    std::vector<bool> is_pivot(cols, false);
    for (const auto& row : m) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_zero()) {
                pivot_col_of_row.push_back((int)c);
                is_pivot[c] = true;
                break;
            }
        }
    }
    RatMat basis;
    for (std::size_t fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc]) continue;
        RatVec v(cols, Rational(0));
        v[fc] = Rational(1);
        for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
            v[pivot_col_of_row[r]] = -m[r][fc];
        basis.push_back(std::move(v));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Strict-inequality feasibility via Fourier–Motzkin elimination over rationals.
//
// A constraint row {a_0..a_{n-1} | b} means  a.x > b  (strict) or a.x >= b.
// Problem sizes here are tiny (n <= 8 species, a handful of rows), so the
// exponential worst case of FM is irrelevant and we get exact answers.

struct LinConstraint {
    RatVec a;
    Rational b;
    bool strict = true;  // a.x > b vs a.x >= b
};

inline bool fm_feasible(std::vector<LinConstraint> cons, std::size_t nvars) {
    for (std::size_t v = 0; v < nvars; ++v) {
        std::vector<LinConstraint> lower, upper, rest;
        for (auto& c : cons) {
            int s = c.a[v].sign();
            if (s > 0) lower.push_back(std::move(c));        // x_v > (b - a'.x')/a_v
            else if (s < 0) upper.push_back(std::move(c));   // x_v < ...
            else rest.push_back(std::move(c));
        }
        // combine each lower bound with each upper bound
        for (const auto& lo : lower) {
            for (const auto& up : upper) {
                LinConstraint comb;
                comb.a.assign(lo.a.size(), Rational(0));
                Rational alo = lo.a[v], aup = -up.a[v];
                for (std::size_t j = 0; j < lo.a.size(); ++j)
                    comb.a[j] = lo.a[j] * aup + up.a[j] * alo;
                comb.b = lo.b * aup + up.b * alo;
                comb.a[v] = Rational(0);
                comb.strict = lo.strict || up.strict;
                rest.push_back(std::move(comb));
            }
        }
        cons = std::move(rest);
    }
    // only constant constraints remain: 0 > b or 0 >= b
    for (const auto& c : cons) {
        int s = Rational(0) < c.b ? -1 : (c.b < Rational(0) ? 1 : 0);
        if (s < 0) return false;                       // 0 > b with b > 0
        if (s == 0 && c.strict) return false;          // 0 > 0
    }
    return true;
}

}  // namespace acrlab
