#pragma once
// Assembly of one bicovariant calculus Gamma_{+,z} / Gamma_{-,z}: the
// braiding sigma on the left-invariant 2-tensors, the quantum-Lie-algebra
// functionals chi and the f-functionals, the bi-invariant form eta with its
// certification identity, the ad-invariant projections, the standard-basis
// transforms (eta <-> omega, chi <-> X), morphism-space computation via the
// intertwiner linear system, and the braided bracket structure constants.

#include "qgv/group.hpp"

namespace qgv {

struct CalculusData {
  GroupSpec spec;
  // sigma on (Uc,U,Uc,U): row (m n r s), col (i j k l), both row-major pairs
  Tensor sigma;
  // chi values on u: chi_on_u[(i j),(n m)] = chi_ij(u^n_m)
  Tensor chi_on_u;
  // f values on u: f_on_u[(i j)*NN + (r s), (n l)] = f^{ij}_{rs}(u^n_l)
  Tensor f_on_u;
  std::vector<Scalar> eta_coeffs;  // eta = sum_a c_a eta_aa, c_a = D_a^{-1}
  std::vector<Tensor> projections;  // P0,P1 (SL) or P0,P1,P2 (O/Sp)
  // constants
  Scalar mu, nu;             // SL: mu_{±,z}, nu_{±,z}
  Scalar mu0, mu1, mu2;      // O/Sp
  // standard-basis transform: omega_ij = sum W[(ij),(ab)] eta_ab, and
  // X_ij = sum Xt[(ij),(ab)] chi_ab; W = Mt^T, Xt = Mt^{-1}
  Tensor W, Winv, Xt;
};

// ---------------------------------------------------------------------------
// sigma
// ---------------------------------------------------------------------------

inline Tensor build_sigma(const GroupData& g) {
  const Ctx& c = g.ctx;
  int N = g.N, NN = g.NN;
  // Gamma_{+}: RA = rhat^{-1}, RB = rhat; SL Gamma_{-} swaps. O/Sp always +.
  bool swap = (g.is_sl() && g.spec.sign < 0);
  const Tensor& RA = swap ? g.rhat : g.rhat_inv;
  const Tensor& RB = swap ? g.rhat_inv : g.rhat;
  int d4 = NN * NN;
  Tensor S(c, d4, d4);
  // sigma^{mnrs}_{ijkl} = D_k D_x^{-1} RA^{pk}_{xj} RB^{tn}_{yr} RA^{xi}_{tm} RB^{ys}_{pl}
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          int col = (i * N + j) * NN + (k * N + l);
          for (int x = 0; x < N; ++x)
            for (int p = 0; p < N; ++p) {
              const Scalar& ra1 = RA.at(p * N + k, x * N + j);
              if (ra1.is_zero()) continue;
              for (int t = 0; t < N; ++t)
                for (int m = 0; m < N; ++m) {
                  const Scalar& ra2 = RA.at(x * N + i, t * N + m);
                  if (ra2.is_zero()) continue;
                  Scalar pref = g.Dvec[k] / g.Dvec[x] * ra1 * ra2;
                  for (int y = 0; y < N; ++y)
                    for (int n = 0; n < N; ++n) {
                      for (int r = 0; r < N; ++r) {
                        const Scalar& rbA = RB.at(t * N + n, y * N + r);
                        if (rbA.is_zero()) continue;
                        for (int s = 0; s < N; ++s) {
                          const Scalar& rbB = RB.at(y * N + s, p * N + l);
                          if (rbB.is_zero()) continue;
                          int row = (m * N + n) * NN + (r * N + s);
                          S.at(row, col) += pref * rbA * rbB;
                        }
                      }
                    }
                }
            }
        }
  return S;
}

// ---------------------------------------------------------------------------
// chi and f matrices, eta
// ---------------------------------------------------------------------------

// chi_ij = w sum_n D_n^{-1} (lA)^n_i kappa(lB)^j_n - D_i^{-1} delta_ij eps,
// with (lA, lB, w) = (l+, l-, z^{-1}) for Gamma_+ and (l-, l+, z) for the
// SL Gamma_-; values on u.
inline Tensor build_chi_on_u(const GroupData& g) {
  const Ctx& c = g.ctx;
  int N = g.N, NN = g.NN;
  bool minus_sl = (g.is_sl() && g.spec.sign < 0);
  const Tensor& GA = minus_sl ? g.Gm : g.Gp;
  const Tensor& KB = minus_sl ? g.Kp : g.Km;
  Scalar w = minus_sl ? g.z : g.zi;
  Tensor Mt(c, NN, NN);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int m = 0; m < N; ++m)
        for (int r = 0; r < N; ++r) {
          Scalar v = Scalar::zero(c);
          for (int n = 0; n < N; ++n)
            for (int t = 0; t < N; ++t) {
              const Scalar& a = GA.at(n * N + i, m * N + t);
              if (a.is_zero()) continue;
              const Scalar& b = KB.at(j * N + n, t * N + r);
              if (b.is_zero()) continue;
              v += a * b / g.Dvec[n];
            }
          v *= w;
          if (i == j && m == r) v -= Scalar::one(c) / g.Dvec[i];
          Mt.at(i * N + j, m * N + r) = v;
        }
  return Mt;
}

// f^{ij}_{rs}(u^n_l): z^{-1} R^{in}_{yr} R^{ys}_{jl} for Gamma_+,
// z R^{-1,in}_{yr} R^{-1,ys}_{jl} for the SL Gamma_-.
inline Tensor build_f_on_u(const GroupData& g) {
  const Ctx& c = g.ctx;
  int N = g.N, NN = g.NN;
  bool minus_sl = (g.is_sl() && g.spec.sign < 0);
  const Tensor& R = minus_sl ? g.rhat_inv : g.rhat;
  Scalar w = minus_sl ? g.z : g.zi;
  Tensor F(c, NN * NN, NN);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int r = 0; r < N; ++r)
        for (int s = 0; s < N; ++s)
          for (int n = 0; n < N; ++n)
            for (int l = 0; l < N; ++l) {
              Scalar v = Scalar::zero(c);
              for (int y = 0; y < N; ++y) {
                const Scalar& r1 = R.at(i * N + n, y * N + r);
                if (r1.is_zero()) continue;
                const Scalar& r2 = R.at(y * N + s, j * N + l);
                if (!r2.is_zero()) v += r1 * r2;
              }
              if (!v.is_zero())
                F.at((i * N + j) * NN + (r * N + s), n * N + l) = w * v;
            }
  return F;
}

// eta = sum_a D_a^{-1} eta_aa, certified by
// chi_ij = sum_a c_a f^{aa}_{ij} - c_i delta_ij eps  (values on u).
inline std::vector<Scalar> build_eta(const GroupData& g, const Tensor& chi_on_u,
                                     const Tensor& f_on_u) {
  const Ctx& c = g.ctx;
  int N = g.N, NN = g.NN;
  std::vector<Scalar> coeffs(N);
  for (int a = 0; a < N; ++a) coeffs[a] = Scalar::one(c) / g.Dvec[a];
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int n = 0; n < N; ++n)
        for (int l = 0; l < N; ++l) {
          Scalar v = Scalar::zero(c);
          for (int a = 0; a < N; ++a)
            v += coeffs[a] * f_on_u.at((a * N + a) * NN + (i * N + j), n * N + l);
          if (i == j && n == l) v -= coeffs[i];  // counit term: eps(u^n_l)=delta
          if (v != chi_on_u.at(i * N + j, n * N + l))
            throw std::runtime_error("eta certification failed for " + g.spec.tag());
        }
  return coeffs;
}

// ---------------------------------------------------------------------------
// projections
// ---------------------------------------------------------------------------

inline std::vector<Tensor> build_projections(const GroupData& g) {
  const Ctx& c = g.ctx;
  int N = g.N, NN = g.NN;
  std::vector<Tensor> P;
  if (g.is_sl()) {
    Tensor P0(c, NN, NN);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        // P0^{ij}_{kl} = sfrak^{-1} q^{-2i} delta^{ij} delta_{kl}, 1-based i
        P0.at(i * N + i, k * N + k) = g.q.pow(-2 * (i + 1)) / g.sfrak;
      }
    P.push_back(P0);
    P.push_back(Tensor::identity(c, NN) - P0);
  } else {
    Tensor P0(c, NN, NN);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Scalar bc = Scalar::zero(c);
        for (int m = 0; m < N; ++m) bc += g.Bmat.at(m, i) * g.Cmat.at(m, j);
        if (bc.is_zero()) continue;
        bc /= g.sfrak;
        for (int k = 0; k < N; ++k) P0.at(i * N + j, k * N + k) = bc;
      }
    // BRC^{ij}_{kl} = B[m,i] Rhat[(m j),(n l)] C[k,n]
    Tensor BRC(c, NN, NN);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k)
          for (int l = 0; l < N; ++l) {
            Scalar v = Scalar::zero(c);
            for (int m = 0; m < N; ++m) {
              const Scalar& b = g.Bmat.at(m, i);
              if (b.is_zero()) continue;
              for (int n = 0; n < N; ++n) {
                const Scalar& r = g.rhat.at(m * N + j, n * N + l);
                if (r.is_zero()) continue;
                v += b * r * g.Cmat.at(k, n);
              }
            }
            if (!v.is_zero()) BRC.at(i * N + j, k * N + l) = v;
          }
    Tensor Id = Tensor::identity(c, NN);
    Scalar q = g.q, qi = g.qi, pi = Scalar::one(c) / g.p;
    Scalar denom = q + qi;
    Tensor Pp = (Id * qi + BRC - P0 * (qi + pi)) * (Scalar::one(c) / denom);
    Tensor Pm = (Id * q - BRC + P0 * (pi - q)) * (Scalar::one(c) / denom);
    P.push_back(P0);
    if (g.spec.series == Series::O) {
      P.push_back(Pm);  // P1 := P-
      P.push_back(Pp);  // P2 := P+
    } else {
      P.push_back(Pp);  // Sp: P1 := P+
      P.push_back(Pm);  // P2 := P-
    }
  }
  return P;
}

// ---------------------------------------------------------------------------
// constants and standard-basis transform
// ---------------------------------------------------------------------------

inline void build_constants(const GroupData& g, CalculusData& cd) {
  const Ctx& c = g.ctx;
  if (g.is_sl()) {
    if (g.spec.sign > 0) {
      cd.mu = g.sfrak * (g.zi - Scalar::one(c)) + g.zi * g.qi * g.Q;
      cd.nu = g.zi * g.qi * g.Q;
    } else {
      cd.mu = g.sfrak * (g.z - Scalar::one(c)) - g.z * g.q.pow(-2 * g.N - 1) * g.Q;
      cd.nu = -g.z * g.q.pow(-2 * g.N - 1) * g.Q;
    }
  } else {
    Scalar pmpi = (g.p - Scalar::one(c) / g.p) * g.Q;
    if (g.spec.sign > 0) {
      cd.mu0 = pmpi;
      cd.mu1 = g.p * (Scalar::one(c) + g.q.pow(-g.N)) * g.Q;
      cd.mu2 = (g.p - g.q.pow(g.N) / g.p) * g.Q;
    } else {
      cd.mu0 = -(pmpi + Scalar::integer(c, 2) * g.sfrak);
      cd.mu1 = -(g.p * (Scalar::one(c) + g.q.pow(-g.N)) * g.Q);
      cd.mu2 = -((g.p - g.q.pow(g.N) / g.p) * g.Q);
    }
  }
}

inline void build_transforms(const GroupData& g, CalculusData& cd) {
  cd.W = cd.chi_on_u.transpose();
  cd.Winv = inverse(cd.W);
  cd.Xt = inverse(cd.chi_on_u);
}

// ---------------------------------------------------------------------------
// intertwiners and morphism spaces
// ---------------------------------------------------------------------------

// Generator value matrices on a corep word (both l+ and l-, all entries).
inline std::vector<Tensor> generator_values(const GroupData& g, const CorepWord& w) {
  std::vector<Tensor> out;
  int D = w.dim(g.N);
  for (Atom a : {Atom::Lp, Atom::Lm}) {
    Tensor st = eval_atom_on_word(g, a, w);
    for (int i = 0; i < g.N; ++i)
      for (int k = 0; k < g.N; ++k) out.push_back(entry_matrix(g, st, i, k, D));
  }
  return out;
}

inline bool intertwiner_test(const GroupData& g, const Tensor& A, const CorepWord& src,
                             const CorepWord& tgt) {
  int Ds = src.dim(g.N), Dt = tgt.dim(g.N);
  if (A.rows() != Dt || A.cols() != Ds) throw std::invalid_argument("intertwiner_test: shape");
  auto Hs = generator_values(g, src);
  auto Ht = generator_values(g, tgt);
  for (size_t k = 0; k < Hs.size(); ++k)
    if (contract(Ht[k], A) != contract(A, Hs[k])) return false;
  return true;
}

struct MorphismSpace {
  CorepWord source, target;
  std::vector<Tensor> basis;
  int dimension = 0;
};

// Assemble the intertwiner system rows for unknowns A[r,c] (index r*Ds+c).
template <typename RowSink>
inline void mor_system_rows(const GroupData& g, const CorepWord& src, const CorepWord& tgt,
                            RowSink&& sink) {
  int Ds = src.dim(g.N), Dt = tgt.dim(g.N);
  auto Hs = generator_values(g, src);
  auto Ht = generator_values(g, tgt);
  const Ctx& c = g.ctx;
  for (size_t k = 0; k < Hs.size(); ++k) {
    // equation (R,C): sum_m Ht[R,m] A[m,C] - sum_m A[R,m] Hs[m,C] = 0
    for (int R = 0; R < Dt; ++R)
      for (int C = 0; C < Ds; ++C) {
        std::map<int, Scalar> row;
        for (int m = 0; m < Dt; ++m) {
          const Scalar& v = Ht[k].at(R, m);
          if (!v.is_zero()) {
            auto [it, fresh] = row.try_emplace(m * Ds + C, v);
            if (!fresh) it->second += v;
          }
        }
        for (int m = 0; m < Ds; ++m) {
          const Scalar& v = Hs[k].at(m, C);
          if (!v.is_zero()) {
            auto [it, fresh] = row.try_emplace(R * Ds + m, -v);
            if (!fresh) it->second -= v;
          }
        }
        SparseRow sr;
        for (auto& [col, val] : row)
          if (!val.is_zero()) sr.emplace_back(col, val);
        if (!sr.empty()) sink(std::move(sr));
      }
  }
  (void)c;
}

inline MorphismSpace mor_space(const GroupData& g, const CorepWord& src, const CorepWord& tgt) {
  int Ds = src.dim(g.N), Dt = tgt.dim(g.N);
  Reducer red(g.ctx, Dt * Ds);
  mor_system_rows(g, src, tgt, [&](SparseRow r) { red.add_row(std::move(r)); });
  MorphismSpace ms;
  ms.source = src;
  ms.target = tgt;
  for (auto& v : red.kernel_basis()) {
    Tensor A(g.ctx, Dt, Ds);
    for (int r = 0; r < Dt; ++r)
      for (int c2 = 0; c2 < Ds; ++c2) A.at(r, c2) = v[(size_t)r * Ds + c2];
    ms.basis.push_back(std::move(A));
  }
  ms.dimension = (int)ms.basis.size();
  return ms;
}

// Kernel dimension of the intertwiner system with the base variable
// specialized to an exact rational value (an upper bound for the symbolic
// morphism dimension, since specialization can only enlarge the kernel).
inline int mor_dimension_sampled(const GroupData& g, const CorepWord& src,
                                 const CorepWord& tgt, const mpq_class& tval) {
  int Ds = src.dim(g.N), Dt = tgt.dim(g.N);
  int ncols = Dt * Ds;
  std::vector<mpq_class> assign(kMaxVars, mpq_class(0));
  assign[0] = tval;
  // rational sparse reducer
  std::vector<std::vector<std::pair<int, mpq_class>>> rows;
  std::map<int, int> pivot;
  auto axpy = [](std::vector<std::pair<int, mpq_class>>& dst, const mpq_class& a,
                 const std::vector<std::pair<int, mpq_class>>& src2) {
    std::vector<std::pair<int, mpq_class>> out;
    out.reserve(dst.size() + src2.size());
    size_t i = 0, j = 0;
    while (i < dst.size() && j < src2.size()) {
      if (dst[i].first < src2[j].first) out.push_back(dst[i++]);
      else if (dst[i].first > src2[j].first) {
        mpq_class v = a * src2[j].second;
        if (v != 0) out.emplace_back(src2[j].first, std::move(v));
        ++j;
      } else {
        mpq_class v = dst[i].second + a * src2[j].second;
        if (v != 0) out.emplace_back(dst[i].first, std::move(v));
        ++i, ++j;
      }
    }
    while (i < dst.size()) out.push_back(dst[i++]);
    while (j < src2.size()) {
      mpq_class v = a * src2[j].second;
      if (v != 0) out.emplace_back(src2[j].first, std::move(v));
      ++j;
    }
    dst = std::move(out);
  };
  mor_system_rows(g, src, tgt, [&](SparseRow sr) {
    std::vector<std::pair<int, mpq_class>> row;
    for (auto& [col, val] : sr) {
      mpq_class v = val.eval(assign);
      if (v != 0) row.emplace_back(col, std::move(v));
    }
    bool changed = true;
    while (changed && !row.empty()) {
      changed = false;
      for (auto& [col, val] : row) {
        auto it = pivot.find(col);
        if (it != pivot.end()) {
          axpy(row, -val, rows[it->second]);
          changed = true;
          break;
        }
      }
    }
    if (row.empty()) return;
    mpq_class inv = 1 / row.front().second;
    for (auto& [col, val] : row) val *= inv;
    pivot[row.front().first] = (int)rows.size();
    rows.push_back(std::move(row));
  });
  return ncols - (int)rows.size();
}

// ---------------------------------------------------------------------------
// bracket constants
// ---------------------------------------------------------------------------

// Values of chi_ij on an arbitrary corep word, via the functional-word
// machinery: chi_ij = w sum_n D_n^{-1} (lA)^n_i kappa(lB)^j_n - c_i d_ij eps.
inline Tensor chi_on_word(const GroupData& g, int i, int j, const CorepWord& w) {
  const Ctx& c = g.ctx;
  int D = w.dim(g.N);
  bool minus_sl = (g.is_sl() && g.spec.sign < 0);
  Atom a1 = minus_sl ? Atom::Lm : Atom::Lp;
  Atom a2 = minus_sl ? Atom::KLp : Atom::KLm;
  Scalar wgt = minus_sl ? g.z : g.zi;
  Tensor acc(c, D, D);
  for (int n = 0; n < g.N; ++n) {
    IndexedWord iw{{{a1, {n, i}}, {a2, {j, n}}}};
    acc = acc + eval_word(g, iw, w) * (wgt / g.Dvec[n]);
  }
  if (i == j) acc = acc - Tensor::identity(c, D) * (Scalar::one(c) / g.Dvec[i]);
  return acc;
}

// Structure constants of the quantum tangent space bracket
//   [chi_i, chi_j] = chi_i chi_j - sigma^{ij}_{kl} chi_k chi_l
// (convolution products), expressed in the chi basis via the values on u:
// the product values (chi_i chi_j)(u^n_l) = sum_y chi_i(u^n_y) chi_j(u^y_l)
// determine the combination uniquely because chi |-> (values on u) is
// invertible. Returned as B[(i)*NN+(j), m] with pair indices i,j,m.
inline Tensor bracket_constants(const GroupData& g, const Tensor& sigma,
                                const Tensor& chi_on_u) {
  const Ctx& c = g.ctx;
  int N = g.N, NN = g.NN;
  Tensor conv(c, NN * NN, NN);
  for (int i = 0; i < NN; ++i)
    for (int j = 0; j < NN; ++j)
      for (int n = 0; n < N; ++n)
        for (int l = 0; l < N; ++l) {
          Scalar v = Scalar::zero(c);
          for (int y = 0; y < N; ++y)
            v += chi_on_u.at(i, n * N + y) * chi_on_u.at(j, y * N + l);
          if (!v.is_zero()) conv.at(i * NN + j, n * N + l) = v;
        }
  Tensor rhs = conv - contract(sigma, conv);
  return contract(rhs, inverse(chi_on_u));
}

// ---------------------------------------------------------------------------
// full assembly
// ---------------------------------------------------------------------------

inline CalculusData build_calculus(const GroupData& g) {
  CalculusData cd;
  cd.spec = g.spec;
  cd.sigma = build_sigma(g);
  cd.chi_on_u = build_chi_on_u(g);
  cd.f_on_u = build_f_on_u(g);
  cd.eta_coeffs = build_eta(g, cd.chi_on_u, cd.f_on_u);
  cd.projections = build_projections(g);
  build_constants(g, cd);
  build_transforms(g, cd);
  return cd;
}

}  // namespace qgv
