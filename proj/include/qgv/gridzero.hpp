#pragma once
// Exact verification of rational-function matrix identities by evaluation.
//
// A polynomial of degree at most D that vanishes at D+1 distinct points is
// identically zero.  Each identity checked here is first bounded: writing
// every matrix entry over a common denominator, the cleared numerator of the
// identity has degree at most D in the deformation variable (and known small
// degree in the remaining parameters).  Evaluating the identity exactly, in
// rational arithmetic, at D+1 distinct points where no denominator vanishes
// therefore constitutes a complete proof of the identity - this is
// deterministic interpolation, not probabilistic sampling.

#include <vector>

#include "qgv/scalar.hpp"
#include "qgv/tensor.hpp"

namespace qgv {
namespace gridzero {

// Power-table point evaluator: caches val^e per variable.
struct PowTable {
  std::vector<mpq_class> vals;
  std::vector<mpq_class> pw[kMaxVars];
  explicit PowTable(std::vector<mpq_class> v) : vals(std::move(v)) {
    for (int i = 0; i < kMaxVars; ++i) pw[i].push_back(1);
  }
  const mpq_class& power(int v, int e) {
    auto& p = pw[v];
    while ((int)p.size() <= e) p.push_back(p.back() * vals[v]);
    return p[e];
  }
};

inline mpq_class eval_poly(const Poly& p, PowTable& pt) {
  mpq_class acc = 0;
  for (const auto& tm : p.t) {
    mpq_class term(tm.c);
    for (int v = 0; v < kMaxVars; ++v)
      if (tm.m.e[v]) term *= pt.power(v, tm.m.e[v]);
    acc += term;
  }
  return acc;
}

inline mpq_class eval_scalar(const Scalar& s, PowTable& pt) {
  mpq_class d = eval_poly(s.den(), pt);
  if (d == 0) throw PoleError("gridzero: evaluation point hits a pole");
  return eval_poly(s.num(), pt) / d;
}

// Dense rational matrix, row-major.
using NumMat = std::vector<mpq_class>;

inline NumMat eval_tensor(const Tensor& m, PowTable& pt) {
  NumMat r((size_t)m.rows() * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const Scalar& s = m.at(i, j);
      if (!s.is_zero()) r[(size_t)i * m.cols() + j] = eval_scalar(s, pt);
    }
  return r;
}

inline NumMat num_transpose(const NumMat& a, int n) {
  NumMat r((size_t)n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[(size_t)j * n + i] = a[(size_t)i * n + j];
  return r;
}

// square n x n product with zero skipping
inline NumMat num_mul(const NumMat& a, const NumMat& b, int n) {
  NumMat r((size_t)n * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const mpq_class& av = a[(size_t)i * n + k];
      if (av == 0) continue;
      for (int j = 0; j < n; ++j) {
        const mpq_class& bv = b[(size_t)k * n + j];
        if (bv != 0) r[(size_t)i * n + j] += av * bv;
      }
    }
  return r;
}

inline bool num_is_zero(const NumMat& a) {
  for (const auto& v : a)
    if (v != 0) return false;
  return true;
}

// Degree weight of a tensor in variable v: max numerator degree plus the sum
// of the degrees of the distinct denominators.  Writing all entries over the
// product of the distinct denominators, every cleared numerator has degree
// at most this weight; sums of such entries (same common denominator) keep
// the bound, and products of entries from different matrices add weights.
inline int weight_in(const Tensor& m, int v) {
  int dn = 0, dd = 0;
  std::vector<const Poly*> dens;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const Scalar& s = m.at(i, j);
      if (s.is_zero()) continue;
      dn = std::max(dn, s.num().deg_in(v));
      bool found = false;
      for (const Poly* p : dens)
        if (*p == s.den()) {
          found = true;
          break;
        }
      if (!found) {
        dens.push_back(&s.den());
        dd += s.den().deg_in(v);
      }
    }
  return dn + dd;
}

inline int weight_in(const Scalar& s, int v) {
  return s.num().deg_in(v) + s.den().deg_in(v);
}

// max degree of a variable across numerators and denominators of a tensor
inline int deg_in(const Tensor& m, int v) {
  int d = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const Scalar& s = m.at(i, j);
      if (s.is_zero()) continue;
      d = std::max({d, s.num().deg_in(v), s.den().deg_in(v)});
    }
  return d;
}

}  // namespace gridzero
}  // namespace qgv
