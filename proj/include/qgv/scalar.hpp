#pragma once
// Exact arithmetic in the field Q(t1,...,tk) of multivariate rational
// functions: sparse polynomials with arbitrary-precision integer
// coefficients, canonical (gcd-reduced, sign-normalized) fractions,
// graded-lexicographic monomial order, evaluation, substitution and the
// classical limit (deformation variable -> 1).

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgv {

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

class ScalarContext;
using Ctx = std::shared_ptr<const ScalarContext>;

class ScalarContext {
 public:
  explicit ScalarContext(std::vector<std::string> names, int deformation_var = 0)
      : names_(std::move(names)), defvar_(deformation_var) {
    for (size_t i = 0; i < names_.size(); ++i)
      for (size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw std::invalid_argument("duplicate variable name: " + names_[i]);
    if (!names_.empty() && (defvar_ < 0 || defvar_ >= (int)names_.size()))
      throw std::invalid_argument("deformation variable index out of range");
  }
  static Ctx make(std::vector<std::string> names, int deformation_var = 0) {
    return std::make_shared<ScalarContext>(std::move(names), deformation_var);
  }
  size_t nvars() const { return names_.size(); }
  const std::string& name(size_t i) const { return names_.at(i); }
  int index(const std::string& n) const {
    for (size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return (int)i;
    return -1;
  }
  int deformation_var() const { return defvar_; }

 private:
  std::vector<std::string> names_;
  int defvar_;
};

// ---------------------------------------------------------------------------
// Monomials (exponent vectors), graded-lexicographic order
// ---------------------------------------------------------------------------

constexpr int kMaxVars = 8;

struct Monomial {
  std::array<uint16_t, kMaxVars> e{};  // zero-initialized
  int total() const {
    int t = 0;
    for (int i = 0; i < kMaxVars; ++i) t += e[i];
    return t;
  }
  bool operator==(const Monomial& o) const { return e == o.e; }
};

// Returns +1 if a > b in graded lex (earlier variable more significant).
inline int mono_cmp(const Monomial& a, const Monomial& b) {
  int ta = a.total(), tb = b.total();
  if (ta != tb) return ta > tb ? 1 : -1;
  for (int i = 0; i < kMaxVars; ++i)
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
  return 0;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (int i = 0; i < kMaxVars; ++i) {
    uint32_t s = (uint32_t)a.e[i] + b.e[i];
    if (s > 0xffffu) throw std::overflow_error("monomial exponent overflow");
    r.e[i] = (uint16_t)s;
  }
  return r;
}

// a / b; requires divisibility.
inline bool mono_divides(const Monomial& b, const Monomial& a) {
  for (int i = 0; i < kMaxVars; ++i)
    if (b.e[i] > a.e[i]) return false;
  return true;
}
inline Monomial mono_div(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (int i = 0; i < kMaxVars; ++i) r.e[i] = (uint16_t)(a.e[i] - b.e[i]);
  return r;
}
inline Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (int i = 0; i < kMaxVars; ++i) r.e[i] = std::min(a.e[i], b.e[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Sparse polynomial: terms sorted descending in graded lex, no zero coeffs
// ---------------------------------------------------------------------------

struct Term {
  Monomial m;
  mpz_class c;
};

class Poly {
 public:
  std::vector<Term> t;  // descending order

  bool is_zero() const { return t.empty(); }
  bool is_constant() const { return t.empty() || (t.size() == 1 && t[0].m.total() == 0); }
  const Term& lt() const { return t.front(); }  // leading term

  static Poly zero() { return Poly{}; }
  static Poly constant(const mpz_class& c) {
    Poly p;
    if (c != 0) p.t.push_back({Monomial{}, c});
    return p;
  }
  static Poly variable(int idx, int exp = 1) {
    Poly p;
    Term tm;
    tm.m.e[idx] = (uint16_t)exp;
    tm.c = 1;
    p.t.push_back(std::move(tm));
    return p;
  }

  bool operator==(const Poly& o) const {
    if (t.size() != o.t.size()) return false;
    for (size_t i = 0; i < t.size(); ++i)
      if (!(t[i].m == o.t[i].m) || t[i].c != o.t[i].c) return false;
    return true;
  }

  Poly neg() const {
    Poly r = *this;
    for (auto& tm : r.t) tm.c = -tm.c;
    return r;
  }

  friend Poly add(const Poly& a, const Poly& b) {
    Poly r;
    r.t.reserve(a.t.size() + b.t.size());
    size_t i = 0, j = 0;
    while (i < a.t.size() && j < b.t.size()) {
      int c = mono_cmp(a.t[i].m, b.t[j].m);
      if (c > 0)
        r.t.push_back(a.t[i++]);
      else if (c < 0)
        r.t.push_back(b.t[j++]);
      else {
        mpz_class s = a.t[i].c + b.t[j].c;
        if (s != 0) r.t.push_back({a.t[i].m, std::move(s)});
        ++i, ++j;
      }
    }
    while (i < a.t.size()) r.t.push_back(a.t[i++]);
    while (j < b.t.size()) r.t.push_back(b.t[j++]);
    return r;
  }
  friend Poly sub(const Poly& a, const Poly& b) { return add(a, b.neg()); }

  friend Poly mul(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly{};
    if (a.t.size() == 1) return b.mul_term(a.t[0]);
    if (b.t.size() == 1) return a.mul_term(b.t[0]);
    struct Cmp {
      bool operator()(const Monomial& x, const Monomial& y) const {
        return mono_cmp(x, y) > 0;  // descending
      }
    };
    std::map<Monomial, mpz_class, Cmp> acc;
    for (const auto& ta : a.t)
      for (const auto& tb : b.t) acc[mono_mul(ta.m, tb.m)] += ta.c * tb.c;
    Poly r;
    r.t.reserve(acc.size());
    for (auto& [m, c] : acc)
      if (c != 0) r.t.push_back({m, std::move(c)});
    return r;
  }

  Poly mul_term(const Term& s) const {
    Poly r;
    r.t.reserve(t.size());
    for (const auto& tm : t) r.t.push_back({mono_mul(tm.m, s.m), tm.c * s.c});
    return r;
  }
  Poly mul_int(const mpz_class& c) const {
    if (c == 0) return Poly{};
    Poly r = *this;
    for (auto& tm : r.t) tm.c *= c;
    return r;
  }

  int deg_in(int v) const {
    int d = 0;
    for (const auto& tm : t) d = std::max(d, (int)tm.m.e[v]);
    return d;
  }

  // Coefficient of v^k, as a polynomial in the remaining variables.
  Poly coeff_of(int v, int k) const {
    Poly r;
    for (const auto& tm : t)
      if (tm.m.e[v] == (uint16_t)k) {
        Term nt = tm;
        nt.m.e[v] = 0;
        r.t.push_back(std::move(nt));
      }
    std::sort(r.t.begin(), r.t.end(),
              [](const Term& x, const Term& y) { return mono_cmp(x.m, y.m) > 0; });
    return r;
  }

  // Integer content (gcd of coefficients), nonnegative.
  mpz_class content_int() const {
    mpz_class g = 0;
    for (const auto& tm : t) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), tm.c.get_mpz_t());
      if (g == 1) break;
    }
    return g;
  }
  Monomial content_mono() const {
    if (t.empty()) return Monomial{};
    Monomial g = t[0].m;
    for (const auto& tm : t) g = mono_gcd(g, tm.m);
    return g;
  }

  // Substitute variable v := 1 (drop its exponents).
  Poly subst_one(int v) const {
    Poly r;
    for (const auto& tm : t) {
      Term nt = tm;
      nt.m.e[v] = 0;
      r.t.push_back(std::move(nt));
    }
    std::sort(r.t.begin(), r.t.end(),
              [](const Term& x, const Term& y) { return mono_cmp(x.m, y.m) > 0; });
    // combine equal monomials
    Poly out;
    for (auto& tm : r.t) {
      if (!out.t.empty() && out.t.back().m == tm.m)
        out.t.back().c += tm.c;
      else
        out.t.push_back(std::move(tm));
    }
    Poly fin;
    for (auto& tm : out.t)
      if (tm.c != 0) fin.t.push_back(std::move(tm));
    return fin;
  }

  mpq_class eval(const std::vector<mpq_class>& vals) const {
    mpq_class acc = 0;
    for (const auto& tm : t) {
      mpq_class term(tm.c);
      for (int v = 0; v < kMaxVars; ++v) {
        for (int k = 0; k < tm.m.e[v]; ++k) term *= vals[v];
      }
      acc += term;
    }
    return acc;
  }
};

// Exact multivariate division (throws if not exact).
inline Poly poly_divexact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  if (b.t.size() == 1) {  // single-term divisor: divide term-by-term
    const Term& lb = b.lt();
    Poly quo;
    quo.t.reserve(a.t.size());
    for (const auto& tm : a.t) {
      if (!mono_divides(lb.m, tm.m)) throw std::domain_error("inexact polynomial division");
      mpz_class qc, r;
      mpz_tdiv_qr(qc.get_mpz_t(), r.get_mpz_t(), tm.c.get_mpz_t(), lb.c.get_mpz_t());
      if (r != 0) throw std::domain_error("inexact polynomial division (coefficient)");
      quo.t.push_back({mono_div(tm.m, lb.m), std::move(qc)});
    }
    return quo;
  }
  Poly rem = a, quo;
  while (!rem.is_zero()) {
    const Term& lr = rem.lt();
    const Term& lb = b.lt();
    if (!mono_divides(lb.m, lr.m)) throw std::domain_error("inexact polynomial division");
    mpz_class qc, r;
    mpz_tdiv_qr(qc.get_mpz_t(), r.get_mpz_t(), lr.c.get_mpz_t(), lb.c.get_mpz_t());
    if (r != 0) throw std::domain_error("inexact polynomial division (coefficient)");
    Term qt{mono_div(lr.m, lb.m), qc};
    quo.t.push_back(qt);
    rem = sub(rem, b.mul_term(qt));
  }
  std::sort(quo.t.begin(), quo.t.end(),
            [](const Term& x, const Term& y) { return mono_cmp(x.m, y.m) > 0; });
  return quo;
}

// --------------------------- multivariate gcd ------------------------------

namespace detail {

// Leading coefficient of p viewed as a univariate polynomial in v.
inline Poly lc_in(const Poly& p, int v) { return p.coeff_of(v, p.deg_in(v)); }

// Content of p wrt v: gcd of the coefficient polynomials. Declared below.
Poly poly_gcd(const Poly& a, const Poly& b);

inline Poly content_in(const Poly& p, int v) {
  Poly c;
  for (int k = p.deg_in(v); k >= 0; --k) {
    Poly ck = p.coeff_of(v, k);
    if (ck.is_zero()) continue;
    c = c.is_zero() ? ck : poly_gcd(c, ck);
    if (c.is_constant() && !c.is_zero() && c.t[0].c == 1) break;
  }
  return c;
}

// Pseudo-remainder of a by b wrt v: returns r with lc(b)^(da-db+1)*a = q*b + r.
inline Poly prem(Poly a, const Poly& b, int v) {
  int db = b.deg_in(v);
  Poly lb = lc_in(b, v);
  int da = a.deg_in(v);
  int steps = da - db + 1;
  int done = 0;
  while (!a.is_zero() && a.deg_in(v) >= db) {
    int d = a.deg_in(v);
    Poly la = lc_in(a, v);
    // a := lb*a - la*v^(d-db)*b
    Poly shift = Poly::variable(v, d - db);
    a = sub(mul(lb, a), mul(mul(la, shift), b));
    ++done;
  }
  // scale to the full pseudo-remainder normalization
  for (; done < steps; ++done) a = mul(a, lb);
  return a;
}

inline Poly pow_poly(const Poly& p, int n) {
  Poly r = Poly::constant(1);
  for (int i = 0; i < n; ++i) r = mul(r, p);
  return r;
}

// --- heuristic GCD (evaluation/reconstruction with verification) ----------

inline mpz_class max_norm(const Poly& p) {
  mpz_class m = 0;
  for (const auto& tm : p.t) {
    mpz_class a = abs(tm.c);
    if (a > m) m = a;
  }
  return m;
}

// Evaluate variable v at the integer xi.
inline Poly eval_at_int(const Poly& p, int v, const mpz_class& xi) {
  int d = p.deg_in(v);
  std::vector<mpz_class> pw(d + 1);
  pw[0] = 1;
  for (int i = 1; i <= d; ++i) pw[i] = pw[i - 1] * xi;
  struct Cmp {
    bool operator()(const Monomial& x, const Monomial& y) const {
      return mono_cmp(x, y) > 0;
    }
  };
  std::map<Monomial, mpz_class, Cmp> acc;
  for (const auto& tm : p.t) {
    Monomial m = tm.m;
    int e = m.e[v];
    m.e[v] = 0;
    acc[m] += tm.c * pw[e];
  }
  Poly r;
  for (auto& [m, c] : acc)
    if (c != 0) r.t.push_back({m, std::move(c)});
  return r;
}

inline mpz_class smod(const mpz_class& c, const mpz_class& xi) {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
  if (2 * r > xi) r -= xi;
  return r;
}

inline bool divides_exactly(const Poly& d, const Poly& p) {
  if (d.is_constant()) {
    const mpz_class& c = d.lt().c;
    for (const auto& tm : p.t)
      if (!mpz_divisible_p(tm.c.get_mpz_t(), c.get_mpz_t())) return false;
    return true;
  }
  try {
    poly_divexact(p, d);
    return true;
  } catch (const std::domain_error&) {
    return false;
  }
}

// Heuristic gcd of a, b (both nonzero). On success the result is a true gcd
// up to integer content (verified by exact trial division of both inputs).
inline bool heugcd(const Poly& a, const Poly& b, Poly& out) {
  if (a.is_constant() && b.is_constant()) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.lt().c.get_mpz_t(), b.lt().c.get_mpz_t());
    out = Poly::constant(g);
    return true;
  }
  int v = -1;
  for (int i = 0; i < kMaxVars; ++i)
    if (a.deg_in(i) > 0 || b.deg_in(i) > 0) {
      v = i;
      break;
    }
  if (v < 0) return false;
  mpz_class na = max_norm(a), nb = max_norm(b);
  mpz_class xi = 2 * (na < nb ? na : nb) + 29;
  int dmax = std::max(a.deg_in(v), b.deg_in(v));
  for (int tries = 0; tries < 6; ++tries) {
    if ((long)mpz_sizeinbase(xi.get_mpz_t(), 2) * (dmax + 1) > 200000) return false;
    Poly ae = eval_at_int(a, v, xi), be = eval_at_int(b, v, xi);
    if (!ae.is_zero() && !be.is_zero()) {
      Poly gE;
      if (heugcd(ae, be, gE)) {
        // reconstruct candidate from base-xi digits (symmetric residues)
        Poly cand, g = gE;
        int i = 0;
        bool ok = true;
        while (!g.is_zero()) {
          if (i > dmax) {
            ok = false;
            break;
          }
          Poly digit, rest;
          for (const auto& tm : g.t) {
            mpz_class r = smod(tm.c, xi);
            if (r != 0) {
              Term dt = tm;
              dt.m.e[v] = (uint16_t)i;
              dt.c = r;
              digit.t.push_back(std::move(dt));
            }
            mpz_class nc = (tm.c - r) / xi;
            if (nc != 0) rest.t.push_back({tm.m, std::move(nc)});
          }
          cand = add(cand, digit);
          g = std::move(rest);
          ++i;
        }
        // keep integer content: at inner recursion levels it carries the
        // gcd of the outer images; top-level inputs are primitive anyway
        if (ok && !cand.is_zero()) {
          if (divides_exactly(cand, a) && divides_exactly(cand, b)) {
            if (cand.lt().c < 0) cand = cand.neg();
            out = cand;
            return true;
          }
        }
      }
    }
    xi = xi * 73794 / 27011 + 17;
  }
  return false;
}

inline Poly poly_gcd_impl(const Poly& a0, const Poly& b0) {
  if (a0.is_zero()) return b0;
  if (b0.is_zero()) return a0;
  // monomial + integer content fast path
  mpz_class ic;
  mpz_gcd(ic.get_mpz_t(), a0.content_int().get_mpz_t(), b0.content_int().get_mpz_t());
  Monomial mg = mono_gcd(a0.content_mono(), b0.content_mono());
  Poly a = a0, b = b0;
  // strip integer content and common monomial
  a = poly_divexact(a, Poly::constant(a0.content_int()));
  b = poly_divexact(b, Poly::constant(b0.content_int()));
  Term mt{mg, mpz_class(1)};
  Poly monoc;
  monoc.t.push_back(mt);
  if (mg.total() > 0) {
    a = poly_divexact(a, monoc);
    b = poly_divexact(b, monoc);
  }
  // with contents stripped, continue on primitive-by-integer parts
  if (a.is_constant() || b.is_constant()) {
    Poly r = Poly::constant(ic);
    return mul(r, monoc);
  }
  // fast heuristic gcd (verified by trial division); fall through on failure
  {
    Poly hg;
    if (heugcd(a, b, hg)) {
      Poly res = mul(mul(Poly::constant(ic), monoc), hg);
      if (!res.is_zero() && res.lt().c < 0) res = res.neg();
      return res;
    }
  }
  // choose main variable: first variable present in both (else content logic)
  int v = -1;
  for (int i = 0; i < kMaxVars; ++i) {
    bool ina = a.deg_in(i) > 0, inb = b.deg_in(i) > 0;
    if (ina && inb) {
      v = i;
      break;
    }
  }
  if (v < 0) {
    // no common variable: gcd divides the v-contents on each side
    // find a variable in a (or b) and recurse on its content
    for (int i = 0; i < kMaxVars; ++i) {
      if (a.deg_in(i) > 0) return mul(mul(Poly::constant(ic), monoc),
                                      poly_gcd(content_in(a, i), b));
      if (b.deg_in(i) > 0) return mul(mul(Poly::constant(ic), monoc),
                                      poly_gcd(a, content_in(b, i)));
    }
    return mul(Poly::constant(ic), monoc);  // both constants (handled above)
  }
  Poly ca = content_in(a, v), cb = content_in(b, v);
  Poly cc = poly_gcd(ca, cb);
  Poly A = poly_divexact(a, ca), B = poly_divexact(b, cb);
  if (A.deg_in(v) < B.deg_in(v)) std::swap(A, B);
  // subresultant PRS
  Poly g = Poly::constant(1), h = Poly::constant(1);
  while (true) {
    int d = A.deg_in(v) - B.deg_in(v);
    Poly R = prem(A, B, v);
    if (R.is_zero()) break;
    if (R.deg_in(v) == 0) {
      B = Poly::constant(1);
      break;
    }
    A = B;
    B = poly_divexact(R, mul(g, pow_poly(h, d)));
    g = lc_in(A, v);
    if (d == 0) {
      // h unchanged
    } else if (d == 1) {
      h = g;
    } else {
      h = poly_divexact(pow_poly(g, d), pow_poly(h, d - 1));
    }
  }
  Poly pp = B.is_constant() ? Poly::constant(1) : poly_divexact(B, content_in(B, v));
  Poly res = mul(mul(Poly::constant(ic), monoc), mul(cc, pp));
  // normalize sign: positive leading coefficient
  if (!res.is_zero() && res.lt().c < 0) res = res.neg();
  return res;
}

inline Poly poly_gcd(const Poly& a, const Poly& b) { return poly_gcd_impl(a, b); }

}  // namespace detail

inline Poly poly_gcd(const Poly& a, const Poly& b) { return detail::poly_gcd(a, b); }

// ---------------------------------------------------------------------------
// Scalar: canonical fraction num/den
// ---------------------------------------------------------------------------

struct PoleError : std::runtime_error {
  explicit PoleError(const std::string& w) : std::runtime_error(w) {}
};

class Scalar {
 public:
  Scalar() = default;  // invalid until assigned
  Scalar(Ctx ctx, Poly num, Poly den) : ctx_(std::move(ctx)), num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }

  static Scalar zero(const Ctx& c) { return Scalar(c, Poly::zero(), Poly::constant(1)); }
  static Scalar one(const Ctx& c) { return Scalar(c, Poly::constant(1), Poly::constant(1)); }
  static Scalar integer(const Ctx& c, long v) {
    return Scalar(c, Poly::constant(mpz_class(v)), Poly::constant(1));
  }
  static Scalar integer(const Ctx& c, const mpz_class& v) {
    return Scalar(c, Poly::constant(v), Poly::constant(1));
  }
  static Scalar rational(const Ctx& c, long p, long q) {
    return Scalar(c, Poly::constant(mpz_class(p)), Poly::constant(mpz_class(q)));
  }
  static Scalar rational(const Ctx& c, const mpq_class& v) {
    return Scalar(c, Poly::constant(v.get_num()), Poly::constant(v.get_den()));
  }
  static Scalar var(const Ctx& c, int idx, int exp = 1) {
    if (idx < 0 || idx >= (int)c->nvars()) throw std::invalid_argument("variable index");
    if (exp >= 0) return Scalar(c, Poly::variable(idx, exp), Poly::constant(1));
    return Scalar(c, Poly::constant(1), Poly::variable(idx, -exp));
  }
  static Scalar var(const Ctx& c, const std::string& name, int exp = 1) {
    int i = c->index(name);
    if (i < 0) throw std::invalid_argument("unknown variable " + name);
    return var(c, i, exp);
  }

  const Ctx& ctx() const { return ctx_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const {
    return num_ == Poly::constant(1) && den_ == Poly::constant(1);
  }

  bool operator==(const Scalar& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    a.check(b);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Poly g = poly_gcd(a.den_, b.den_);
    Poly da = poly_divexact(a.den_, g), db = poly_divexact(b.den_, g);
    Poly n = add(mul(a.num_, db), mul(b.num_, da));
    if (n.is_zero()) return zero(a.ctx_);
    // operands are reduced, so gcd(n, da*g*db) = gcd(n, g)
    Poly g2 = poly_gcd(n, g);
    Scalar r;
    r.ctx_ = a.ctx_;
    r.num_ = poly_divexact(n, g2);
    r.den_ = mul(mul(da, poly_divexact(g, g2)), db);
    r.sign_fix();
    return r;
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
  Scalar operator-() const {
    Scalar r = *this;
    r.num_ = r.num_.neg();
    return r;
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    a.check(b);
    if (a.is_zero() || b.is_zero()) return zero(a.ctx_);
    Poly g1 = poly_gcd(a.num_, b.den_), g2 = poly_gcd(b.num_, a.den_);
    Poly n = mul(poly_divexact(a.num_, g1), poly_divexact(b.num_, g2));
    Poly d = mul(poly_divexact(a.den_, g2), poly_divexact(b.den_, g1));
    Scalar r;
    r.ctx_ = a.ctx_;
    r.num_ = std::move(n);
    r.den_ = std::move(d);
    r.sign_fix();
    return r;
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw std::domain_error("division by zero Scalar");
    Scalar binv;
    binv.ctx_ = b.ctx_;
    binv.num_ = b.den_;
    binv.den_ = b.num_;
    binv.sign_fix();
    return a * binv;
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  Scalar pow(int n) const {
    if (n == 0) return one(ctx_);
    Scalar base = n > 0 ? *this : one(ctx_) / *this;
    int k = n > 0 ? n : -n;
    Scalar r = one(ctx_);
    while (k) {
      if (k & 1) r *= base;
      base = (k >>= 1) ? base * base : base;
    }
    return r;
  }

  // Exact evaluation at a rational assignment (throws PoleError at poles).
  mpq_class eval(const std::vector<mpq_class>& vals) const {
    mpq_class d = den_.eval(vals);
    if (d == 0) throw PoleError("pole at assignment");
    mpq_class n = num_.eval(vals);
    mpq_class r = n / d;
    r.canonicalize();
    return r;
  }

  // Substitute a variable by a Scalar (same context).
  Scalar subst(int v, const Scalar& val) const {
    Scalar sn = subst_poly(num_, v, val), sd = subst_poly(den_, v, val);
    return sn / sd;
  }

  // Classical limit: deformation variable -> 1 with (t-1)^m cancellation.
  Scalar limit_q_to_one() const {
    int v = ctx_->deformation_var();
    Poly n = num_, d = den_;
    Poly vm1 = sub(Poly::variable(v, 1), Poly::constant(1));
    while (d.subst_one(v).is_zero()) {
      if (!n.subst_one(v).is_zero()) throw PoleError("pole at the classical point");
      n = poly_divexact(n, vm1);
      d = poly_divexact(d, vm1);
    }
    return Scalar(ctx_, n.subst_one(v), d.subst_one(v));
  }

  // ----- canonical textual serialization: "(num)/(den)" -----
  std::string str() const {
    return "(" + poly_str(num_) + ")/(" + poly_str(den_) + ")";
  }

  static Scalar parse(const Ctx& c, const std::string& s);

 private:
  Ctx ctx_;
  Poly num_, den_ = Poly::constant(1);

  void check(const Scalar& o) const {
    if (ctx_ != o.ctx_) throw std::invalid_argument("scalar context mismatch");
  }
  void sign_fix() {
    if (num_.is_zero()) {
      den_ = Poly::constant(1);
      return;
    }
    if (den_.lt().c < 0) {
      den_ = den_.neg();
      num_ = num_.neg();
    }
  }
  void normalize() {
    if (den_.is_zero()) throw std::domain_error("zero denominator");
    if (num_.is_zero()) {
      den_ = Poly::constant(1);
      return;
    }
    Poly g = poly_gcd(num_, den_);
    if (!(g == Poly::constant(1))) {
      num_ = poly_divexact(num_, g);
      den_ = poly_divexact(den_, g);
    }
    sign_fix();
  }

  Scalar subst_poly(const Poly& p, int v, const Scalar& val) const {
    // Horner over powers of v
    int dmax = p.deg_in(v);
    Scalar acc = zero(ctx_);
    for (int k = dmax; k >= 0; --k) {
      Poly ck = p.coeff_of(v, k);
      acc = acc * val + Scalar(ctx_, ck, Poly::constant(1));
    }
    return acc;
  }

  std::string poly_str(const Poly& p) const {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& tm : p.t) {
      mpz_class c = tm.c;
      if (!first) os << (c < 0 ? "-" : "+");
      else if (c < 0) os << "-";
      first = false;
      mpz_class ac = abs(c);
      bool hasvar = tm.m.total() > 0;
      if (ac != 1 || !hasvar) {
        os << ac.get_str();
        if (hasvar) os << "*";
      }
      bool fv = true;
      for (size_t v = 0; v < ctx_->nvars(); ++v) {
        if (tm.m.e[v] == 0) continue;
        if (!fv) os << "*";
        fv = false;
        os << ctx_->name(v);
        if (tm.m.e[v] > 1) os << "^" << (int)tm.m.e[v];
      }
    }
    return os.str();
  }
};

// ----- parser for the canonical serialization -----
namespace detail {
struct PScan {
  const std::string& s;
  size_t i = 0;
  explicit PScan(const std::string& str) : s(str) {}
  char peek() const { return i < s.size() ? s[i] : '\0'; }
  char get() { return i < s.size() ? s[i++] : '\0'; }
  void expect(char c) {
    if (get() != c) throw std::invalid_argument("scalar parse error, expected " + std::string(1, c));
  }
};

inline Poly parse_poly(const Ctx& ctx, PScan& sc) {
  Poly acc;
  bool firstterm = true;
  while (true) {
    int sign = 1;
    char c = sc.peek();
    if (c == '+') {
      sc.get();
    } else if (c == '-') {
      sign = -1;
      sc.get();
    } else if (!firstterm) {
      break;
    }
    firstterm = false;
    // term: optional integer, then *-separated var^exp factors
    mpz_class coef = 1;
    bool sawdigit = false;
    std::string digits;
    while (isdigit(sc.peek())) {
      digits += sc.get();
      sawdigit = true;
    }
    if (sawdigit) coef = mpz_class(digits);
    Monomial m;
    bool expectfactor = !sawdigit;
    while (true) {
      if (sc.peek() == '*') {
        sc.get();
        expectfactor = true;
      } else if (!expectfactor) {
        break;
      }
      if (!isalpha(sc.peek()) && sc.peek() != '_') {
        if (expectfactor && sawdigit) throw std::invalid_argument("scalar parse error");
        break;
      }
      std::string nm;
      while (isalnum(sc.peek()) || sc.peek() == '_') nm += sc.get();
      int vi = ctx->index(nm);
      if (vi < 0) throw std::invalid_argument("unknown variable in scalar: " + nm);
      int e = 1;
      if (sc.peek() == '^') {
        sc.get();
        std::string ed;
        while (isdigit(sc.peek())) ed += sc.get();
        e = std::stoi(ed);
      }
      m.e[vi] = (uint16_t)(m.e[vi] + e);
      expectfactor = false;
    }
    Poly term;
    mpz_class cc = coef * sign;
    if (cc != 0) term.t.push_back({m, cc});
    acc = add(acc, term);
  }
  return acc;
}
}  // namespace detail

inline Scalar Scalar::parse(const Ctx& c, const std::string& s) {
  detail::PScan sc(s);
  sc.expect('(');
  Poly n = detail::parse_poly(c, sc);
  sc.expect(')');
  sc.expect('/');
  sc.expect('(');
  Poly d = detail::parse_poly(c, sc);
  sc.expect(')');
  return Scalar(c, std::move(n), std::move(d));
}

}  // namespace qgv
