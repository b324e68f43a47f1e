#pragma once
// FRT data for one quantum-group spec: the braid matrix R-hat, the metric
// matrix C with inverse B (orthogonal/symplectic series), the diagonal D,
// the structural constants (q, z, Q, p, the quantum trace weight), and the
// value matrices of the L-functionals l+/l- and their antipodes on the
// fundamental corepresentation, together with evaluation of functional
// words on corepresentation tensor words via the coproduct rules.

#include "qgv/tensor.hpp"

namespace qgv {

enum class Series { SL, O, Sp };

inline const char* series_name(Series s) {
  switch (s) {
    case Series::SL: return "sl";
    case Series::O: return "o";
    case Series::Sp: return "sp";
  }
  return "?";
}

// One target calculus: series, rank N of the fundamental corep, and the
// sign of the calculus Gamma_{+,z} / Gamma_{-,z}.
struct GroupSpec {
  Series series;
  int N;
  int sign;  // +1 or -1
  std::string tag() const {
    return std::string(series_name(series)) + std::to_string(N) + "." +
           (sign > 0 ? "plus" : "minus");
  }
};

struct GroupData {
  GroupSpec spec;
  Ctx ctx;
  int N = 0, NN = 0;
  int eps = 0;  // +1 for O, -1 for Sp, 0 for SL

  // structural scalars
  Scalar q, qi, z, zi, Q, p, sfrak;
  // metric family parameters (symbolic variables of the context)
  Scalar alpha, beta, gamma;  // gamma only for O/Sp
  Scalar c0, c1, c2;          // c-parametrization variables (c2 only O/Sp)

  Tensor rhat, rhat_inv;     // N^2 x N^2
  Tensor Cmat, Bmat;         // N x N (O/Sp only)
  std::vector<Scalar> Dvec;  // quantum-trace weights D_i

  // value matrices on u: rows (i,k) of the functional entry, cols (r,c) of u
  Tensor Gp, Gm;  // l+, l-
  Tensor Kp, Km;  // kappa(l+), kappa(l-)

  bool is_sl() const { return spec.series == Series::SL; }
};

namespace detail {

inline Tensor rhat_sl(const Ctx& ctx, int N, const Scalar& q, const Scalar& Q) {
  int NN = N * N;
  Tensor R(ctx, NN, NN);
  for (int i = 0; i < N; ++i) R.at(i * N + i, i * N + i) = q;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      R.at(j * N + i, i * N + j) = Scalar::one(ctx);
      if (i < j) R.at(i * N + j, i * N + j) = Q;
    }
  return R;
}

// rho2[i] = twice the classical rho-vector entry; eps_i the symplectic signs.
inline void bcd_weights(Series s, int N, std::vector<int>& rho2, std::vector<int>& epsv) {
  rho2.assign(N, 0);
  epsv.assign(N, 1);
  int n = N / 2;
  if (s == Series::O) {
    for (int i = 0; i < n; ++i) {
      rho2[i] = N - 2 - 2 * i;
      rho2[N - 1 - i] = -rho2[i];
    }
  } else {  // Sp
    for (int i = 0; i < n; ++i) {
      rho2[i] = N - 2 * i;
      rho2[N - 1 - i] = -rho2[i];
      epsv[N - 1 - i] = -1;
    }
  }
}

inline Tensor rhat_bcd(const Ctx& ctx, Series s, int N, const Scalar& q, const Scalar& Q) {
  int NN = N * N;
  std::vector<int> rho2, epsv;
  bcd_weights(s, N, rho2, epsv);
  auto ipr = [N](int i) { return N - 1 - i; };
  Scalar t = Scalar::var(ctx, 0);
  Tensor R(ctx, NN, NN);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      int e = (i == j ? 1 : 0) - (j == ipr(i) ? 1 : 0);
      R.at(i * N + j, i * N + j) += q.pow(e);
      if (i > j) {
        R.at(i * N + j, j * N + i) += Q;
        R.at(i * N + ipr(i), j * N + ipr(j)) -=
            Q * t.pow(rho2[i] - rho2[j]) * Scalar::integer(ctx, epsv[i] * epsv[j]);
      }
    }
  // R-hat = P R (swap of the row pair indices)
  Tensor Rh(ctx, NN, NN);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int c = 0; c < NN; ++c) Rh.at(j * N + i, c) = R.at(i * N + j, c);
  return Rh;
}

// reshuffles between "operator" layout A[(i,j),(n,m)] and the layout in
// which the partial transpose becomes matrix inversion
inline Tensor tw(const Tensor& A, int N) {
  Tensor T(A.ctx(), N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m) T.at(i * N + n, j * N + m) = A.at(i * N + j, n * N + m);
  return T;
}
inline Tensor untw(const Tensor& T, int N) {
  Tensor A(T.ctx(), N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m) A.at(i * N + j, n * N + m) = T.at(i * N + n, j * N + m);
  return A;
}

}  // namespace detail

inline GroupData build_group(const GroupSpec& spec) {
  GroupData g;
  g.spec = spec;
  g.N = spec.N;
  g.NN = spec.N * spec.N;
  int N = g.N;
  if (spec.series == Series::SL) {
    // base variable s with q = s^N, z = s^2 (the allowed z with z^N = q^2)
    g.ctx = ScalarContext::make({"s", "al", "be", "c0", "c1"});
    const Ctx& c = g.ctx;
    g.q = Scalar::var(c, 0, N);
    g.qi = Scalar::var(c, 0, -N);
    g.z = spec.sign > 0 ? Scalar::var(c, 0, 2) : Scalar::var(c, 0, 2);
    g.zi = Scalar::var(c, 0, -2);
    g.Q = g.q - g.qi;
    g.alpha = Scalar::var(c, "al");
    g.beta = Scalar::var(c, "be");
    g.c0 = Scalar::var(c, "c0");
    g.c1 = Scalar::var(c, "c1");
    g.sfrak = Scalar::zero(c);
    g.Dvec.resize(N);
    for (int i = 1; i <= N; ++i) {
      g.Dvec[i - 1] = g.q.pow(2 * i);
      g.sfrak += g.q.pow(-2 * i);
    }
    g.rhat = detail::rhat_sl(c, N, g.q, g.Q);
  } else {
    g.eps = (spec.series == Series::O) ? 1 : -1;
    g.ctx = ScalarContext::make({"t", "al", "be", "ga", "c0", "c1", "c2"});
    const Ctx& c = g.ctx;
    g.q = Scalar::var(c, 0, 2);  // q = t^2, t the half-power unit
    g.qi = Scalar::var(c, 0, -2);
    g.z = Scalar::integer(c, spec.sign);
    g.zi = g.z;
    g.Q = g.q - g.qi;
    g.alpha = Scalar::var(c, "al");
    g.beta = Scalar::var(c, "be");
    g.gamma = Scalar::var(c, "ga");
    g.c0 = Scalar::var(c, "c0");
    g.c1 = Scalar::var(c, "c1");
    g.c2 = Scalar::var(c, "c2");
    g.p = Scalar::integer(c, g.eps) * g.q.pow(N - g.eps);
    g.sfrak = Scalar::one(c) + (g.p - Scalar::one(c) / g.p) / g.Q;
    g.rhat = detail::rhat_bcd(c, spec.series, N, g.q, g.Q);
    // metric matrix C and inverse B
    std::vector<int> rho2, epsv;
    detail::bcd_weights(spec.series, N, rho2, epsv);
    Scalar t = Scalar::var(c, 0);
    g.Cmat = Tensor(c, N, N);
    for (int i = 0; i < N; ++i)
      g.Cmat.at(i, N - 1 - i) = Scalar::integer(c, epsv[i]) * t.pow(-rho2[i]);
    g.Bmat = inverse(g.Cmat);
    g.Dvec.resize(N);
    for (int i = 0; i < N; ++i) {
      g.Dvec[i] = Scalar::zero(c);
      for (int m = 0; m < N; ++m) g.Dvec[i] += g.Cmat.at(i, m) * g.Bmat.at(i, m);
    }
  }
  g.rhat_inv = inverse(g.rhat);
  // value matrices of the L-functionals on u
  const Ctx& c = g.ctx;
  g.Gp = Tensor(c, g.NN, g.NN);
  g.Gm = Tensor(c, g.NN, g.NN);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m) {
          g.Gp.at(a * N + b, n * N + m) = g.rhat.at(a * N + n, m * N + b);
          g.Gm.at(a * N + b, n * N + m) = g.rhat_inv.at(a * N + n, m * N + b);
        }
  g.Kp = detail::untw(inverse(detail::tw(g.Gp, N)), N);
  g.Km = detail::untw(inverse(detail::tw(g.Gm, N)), N);
  return g;
}

// ---------------------------------------------------------------------------
// Functional words and corepresentation words
// ---------------------------------------------------------------------------

enum class Atom : uint8_t { Lp, Lm, KLp, KLm };
enum class Corep : uint8_t { U, Uc };

struct FunctionalWord {
  // a product of generator matrices; each atom carries free indices (row,col)
  std::vector<Atom> atoms;
};
struct CorepWord {
  std::vector<Corep> factors;
  int dim(int N) const {
    int d = 1;
    for (size_t i = 0; i < factors.size(); ++i) d *= N;
    return d;
  }
};

// Value bimatrix of one atom on one corep factor: rows (i,k) the functional
// entry indices, cols (r,c) the matrix-position indices of the factor.
// For a Uc factor the position (m,a) refers to (u^c)^m_a = kappa(u^a_m), so
// the argument indices are swapped and the kappa^2 weight D_a/D_m appears
// for the atoms that already carry one antipode.
inline Tensor atom_value(const GroupData& g, Atom a, Corep f) {
  int N = g.N;
  const Tensor* base = nullptr;
  bool add_kappa = (f == Corep::Uc);
  switch (a) {
    case Atom::Lp: base = add_kappa ? &g.Kp : &g.Gp; break;
    case Atom::Lm: base = add_kappa ? &g.Km : &g.Gm; break;
    case Atom::KLp: base = &g.Gp; break;  // kappa^2 weight added below
    case Atom::KLm: base = &g.Gm; break;
  }
  if (f == Corep::U) {
    if (a == Atom::KLp) return g.Kp;
    if (a == Atom::KLm) return g.Km;
    return *base;
  }
  // Uc factor
  Tensor out(g.ctx, g.NN, g.NN);
  const Ctx& ctx = g.ctx;
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k)
      for (int m = 0; m < N; ++m)
        for (int aa = 0; aa < N; ++aa) {
          // value on kappa(u^aa_m)
          Scalar v;
          if (a == Atom::Lp || a == Atom::Lm) {
            v = base->at(i * N + k, aa * N + m);
          } else {
            // kappa(l)(kappa(u)) = l(kappa^2(u)) = (D_a / D_m) l(u)
            v = g.Dvec[aa] / g.Dvec[m] * base->at(i * N + k, aa * N + m);
          }
          if (!v.is_zero()) out.at(i * N + k, m * N + aa) = v;
        }
  return out;
}

namespace detail {
inline const Ctx& gctx(const GroupData& g) { return g.ctx; }
}

// Value of a single atom (with free entry indices) on a corep tensor word:
// result rows = (i,k) entry indices, cols = R*D + C with R,C the row/column
// multi-indices of the word. The entry index is threaded across the factors
// by the coproduct rule (reversed order for the antipoded atoms).
inline Tensor eval_atom_on_word(const GroupData& g, Atom a, const CorepWord& w) {
  const Ctx& c = g.ctx;
  int N = g.N;
  bool rev = (a == Atom::KLp || a == Atom::KLm);
  // state: rows (i,k), cols (R*D + C) for the prefix processed so far
  int D = 1;
  Tensor st(c, g.NN, 1);
  for (int i = 0; i < N; ++i) st.at(i * N + i, 0) = Scalar::one(c);  // h(1)=delta
  for (Corep f : w.factors) {
    Tensor V = atom_value(g, a, f);
    int D2 = D * N;
    Tensor nxt(c, g.NN, D2 * D2);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k)
        for (int y = 0; y < N; ++y) {
          // normal: h^i_k -> sum_y h^i_y (prefix) * h^y_k (new factor)
          // reversed: h^i_k -> sum_y h^y_k (prefix) * h^i_y (new factor)
          int prow = rev ? y * N + k : i * N + y;
          int vrow = rev ? i * N + y : y * N + k;
          for (int R = 0; R < D; ++R)
            for (int C = 0; C < D; ++C) {
              const Scalar& pv = st.at(prow, R * D + C);
              if (pv.is_zero()) continue;
              for (int r = 0; r < N; ++r)
                for (int cc = 0; cc < N; ++cc) {
                  const Scalar& vv = V.at(vrow, r * N + cc);
                  if (vv.is_zero()) continue;
                  nxt.at(i * N + k, (R * N + r) * D2 + (C * N + cc)) += pv * vv;
                }
            }
        }
    st = std::move(nxt);
    D = D2;
  }
  return st;
}

// Extract the D x D matrix of entry (i,k) from an eval_atom_on_word result.
inline Tensor entry_matrix(const GroupData& g, const Tensor& st, int i, int k, int D) {
  Tensor m(g.ctx, D, D);
  for (int R = 0; R < D; ++R)
    for (int C = 0; C < D; ++C) m.at(R, C) = st.at(i * g.N + k, R * D + C);
  return m;
}

// A functional word with specific entry indices per atom.
struct IndexedWord {
  std::vector<std::pair<Atom, std::pair<int, int>>> entries;  // (atom, (i,k))
};

// Evaluate a product of specific generator entries on a corep word: the
// product of functionals acts through the matrix-coalgebra coproduct of the
// word, i.e. the corep-index matrix product of the single-atom values.
inline Tensor eval_word(const GroupData& g, const IndexedWord& w, const CorepWord& cw) {
  int D = cw.dim(g.N);
  Tensor acc = Tensor::identity(g.ctx, D);
  for (const auto& [a, ik] : w.entries) {
    Tensor st = eval_atom_on_word(g, a, cw);
    acc = contract(acc, entry_matrix(g, st, ik.first, ik.second, D));
  }
  return acc;
}

// Independent evaluation path for the same word: evaluate the whole product
// on each single factor (chaining the corep index inside the factor), then
// thread the composite coproduct boundary of all atoms across the factors.
// Agrees with eval_word by the bialgebra compatibility; used as cross-check.
inline Tensor eval_word_factor_major(const GroupData& g, const IndexedWord& w,
                                     const CorepWord& cw) {
  const Ctx& c = g.ctx;
  int N = g.N;
  int P = (int)w.entries.size();
  int B = 1;
  for (int t = 0; t < P; ++t) B *= N;
  auto digits = [&](int x) {
    std::vector<int> d(P);
    for (int t = P - 1; t >= 0; --t) {
      d[t] = x % N;
      x /= N;
    }
    return d;
  };
  auto pack = [&](const std::vector<int>& d) {
    int x = 0;
    for (int t = 0; t < P; ++t) x = x * N + d[t];
    return x;
  };
  auto reversed = [&](int t) {
    Atom a = w.entries[t].first;
    return a == Atom::KLp || a == Atom::KLm;
  };
  // boundary start: i_t for normal atoms, k_t for reversed ones
  std::vector<int> start(P), fin(P);
  for (int t = 0; t < P; ++t) {
    start[t] = reversed(t) ? w.entries[t].second.second : w.entries[t].second.first;
    fin[t] = reversed(t) ? w.entries[t].second.first : w.entries[t].second.second;
  }
  // state: per composite boundary Y, the prefix corep matrix (Dcur x Dcur)
  int Dcur = 1;
  std::vector<Tensor> st(B);
  st[pack(start)] = Tensor(c, 1, 1);
  st[pack(start)].at(0, 0) = Scalar::one(c);
  for (Corep f : cw.factors) {
    std::vector<Tensor> V(P, Tensor(c, 1, 1));
    for (int t = 0; t < P; ++t) V[t] = atom_value(g, w.entries[t].first, f);
    int D2 = Dcur * N;
    std::vector<Tensor> nxt(B);
    for (int Y = 0; Y < B; ++Y) {
      if (st[Y].rows() == 0 || st[Y].is_zero()) continue;
      auto yd = digits(Y);
      for (int Y2 = 0; Y2 < B; ++Y2) {
        auto y2d = digits(Y2);
        // value of the product on this single factor with boundary Y -> Y2:
        // chain the corep index through the atoms in order
        Tensor F = Tensor::identity(c, N);
        bool zero = false;
        for (int t = 0; t < P && !zero; ++t) {
          int row = reversed(t) ? y2d[t] * N + yd[t] : yd[t] * N + y2d[t];
          Tensor Vt(c, N, N);
          bool any = false;
          for (int r = 0; r < N; ++r)
            for (int m = 0; m < N; ++m) {
              const Scalar& v = V[t].at(row, r * N + m);
              if (!v.is_zero()) {
                Vt.at(r, m) = v;
                any = true;
              }
            }
          if (!any) zero = true;
          else F = contract(F, Vt);
        }
        if (zero || F.is_zero()) continue;
        if (nxt[Y2].rows() == 0) nxt[Y2] = Tensor(c, D2, D2);
        for (int R = 0; R < Dcur; ++R)
          for (int C = 0; C < Dcur; ++C) {
            const Scalar& pv = st[Y].at(R, C);
            if (pv.is_zero()) continue;
            for (int r = 0; r < N; ++r)
              for (int cc = 0; cc < N; ++cc) {
                const Scalar& fv = F.at(r, cc);
                if (!fv.is_zero()) nxt[Y2].at(R * N + r, C * N + cc) += pv * fv;
              }
          }
      }
    }
    st = std::move(nxt);
    Dcur = D2;
  }
  Tensor& res = st[pack(fin)];
  if (res.rows() == 0) return Tensor(c, Dcur, Dcur);
  return res;
}

}  // namespace qgv
