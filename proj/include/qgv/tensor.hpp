#pragma once
// Dense matrices/tensors of exact Scalars with typed index signatures,
// contraction (matrix product), Kronecker products, and exact linear
// algebra: reduced row echelon form, rank, kernel bases with a
// deterministic convention (pivots leftmost, free columns ascending),
// affine-system classification, determinant and inverse.

#include <algorithm>
#include <functional>
#include <numeric>
#include <utility>

#include "qgv/scalar.hpp"

namespace qgv {

// One tensor factor of an index word.
enum class FTag : uint8_t { U, Uc, Pair, Scalar1 };

inline const char* ftag_name(FTag t) {
  switch (t) {
    case FTag::U: return "u";
    case FTag::Uc: return "uc";
    case FTag::Pair: return "pair";
    case FTag::Scalar1: return "1";
  }
  return "?";
}

struct IndexSignature {
  std::vector<FTag> row, col;
  friend IndexSignature concat(const IndexSignature& a, const IndexSignature& b) {
    IndexSignature r = a;
    r.row.insert(r.row.end(), b.row.begin(), b.row.end());
    r.col.insert(r.col.end(), b.col.begin(), b.col.end());
    return r;
  }
};

class Tensor {
 public:
  Tensor() = default;
  Tensor(Ctx ctx, int nr, int nc, IndexSignature sig = {})
      : ctx_(std::move(ctx)), nr_(nr), nc_(nc), sig_(std::move(sig)),
        data_(nr * nc, Scalar::zero(ctx_)) {}

  static Tensor identity(const Ctx& c, int n) {
    Tensor t(c, n, n);
    for (int i = 0; i < n; ++i) t.at(i, i) = Scalar::one(c);
    return t;
  }
  static Tensor zero(const Ctx& c, int nr, int nc) { return Tensor(c, nr, nc); }

  const Ctx& ctx() const { return ctx_; }
  int rows() const { return nr_; }
  int cols() const { return nc_; }
  const IndexSignature& sig() const { return sig_; }
  IndexSignature& sig() { return sig_; }

  Scalar& at(int r, int c) { return data_[(size_t)r * nc_ + c]; }
  const Scalar& at(int r, int c) const { return data_[(size_t)r * nc_ + c]; }

  bool is_zero() const {
    for (const auto& s : data_)
      if (!s.is_zero()) return false;
    return true;
  }
  bool operator==(const Tensor& o) const {
    if (nr_ != o.nr_ || nc_ != o.nc_) return false;
    for (size_t i = 0; i < data_.size(); ++i)
      if (data_[i] != o.data_[i]) return false;
    return true;
  }
  bool operator!=(const Tensor& o) const { return !(*this == o); }

  Tensor operator+(const Tensor& o) const {
    require_shape(o);
    Tensor r = *this;
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }
  Tensor operator-(const Tensor& o) const {
    require_shape(o);
    Tensor r = *this;
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }
  Tensor operator*(const Scalar& s) const {
    Tensor r = *this;
    for (auto& e : r.data_) e *= s;
    return r;
  }
  Tensor operator-() const { return *this * (-Scalar::one(ctx_)); }

  Tensor transpose() const {
    Tensor r(ctx_, nc_, nr_, {sig_.col, sig_.row});
    for (int i = 0; i < nr_; ++i)
      for (int j = 0; j < nc_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  // Matrix product (index contraction in the linearized representation).
  friend Tensor contract(const Tensor& a, const Tensor& b) {
    if (a.nc_ != b.nr_) throw std::invalid_argument("contract: dimension mismatch");
    Tensor r(a.ctx_, a.nr_, b.nc_, {a.sig_.row, b.sig_.col});
    for (int i = 0; i < a.nr_; ++i)
      for (int k = 0; k < a.nc_; ++k) {
        const Scalar& av = a.at(i, k);
        if (av.is_zero()) continue;
        for (int j = 0; j < b.nc_; ++j) {
          const Scalar& bv = b.at(k, j);
          if (!bv.is_zero()) r.at(i, j) += av * bv;
        }
      }
    return r;
  }

  // Kronecker product, row-major linearization; signatures concatenated.
  friend Tensor kron(const Tensor& a, const Tensor& b) {
    Tensor r(a.ctx_, a.nr_ * b.nr_, a.nc_ * b.nc_,
             concat(a.sig_, b.sig_));
    for (int i = 0; i < a.nr_; ++i)
      for (int j = 0; j < a.nc_; ++j) {
        const Scalar& av = a.at(i, j);
        if (av.is_zero()) continue;
        for (int k = 0; k < b.nr_; ++k)
          for (int l = 0; l < b.nc_; ++l) {
            const Scalar& bv = b.at(k, l);
            if (!bv.is_zero()) r.at(i * b.nr_ + k, j * b.nc_ + l) = av * bv;
          }
      }
    return r;
  }

  Tensor column(int c) const {
    Tensor r(ctx_, nr_, 1);
    for (int i = 0; i < nr_; ++i) r.at(i, 0) = at(i, c);
    return r;
  }
  Tensor row(int r0) const {
    Tensor r(ctx_, 1, nc_);
    for (int j = 0; j < nc_; ++j) r.at(0, j) = at(r0, j);
    return r;
  }

  // Evaluate every entry at a rational assignment (exact).
  std::vector<mpq_class> eval_all(const std::vector<mpq_class>& vals) const {
    std::vector<mpq_class> out;
    out.reserve(data_.size());
    for (const auto& s : data_) out.push_back(s.eval(vals));
    return out;
  }

 private:
  Ctx ctx_;
  int nr_ = 0, nc_ = 0;
  IndexSignature sig_;
  std::vector<Scalar> data_;
  void require_shape(const Tensor& o) const {
    if (nr_ != o.nr_ || nc_ != o.nc_) throw std::invalid_argument("tensor shape mismatch");
  }
};

// ---------------------------------------------------------------------------
// Exact elimination: incremental reduced-echelon reducer over Q(t1..tk),
// sparse rows internally, deterministic pivot convention.
// ---------------------------------------------------------------------------

using SparseRow = std::vector<std::pair<int, Scalar>>;  // (col, value), cols ascending

class Reducer {
 public:
  Reducer(Ctx ctx, int ncols) : ctx_(std::move(ctx)), ncols_(ncols) {}

  // Reduce a row against the current pivots; if nonzero remains, install it
  // as a new pivot row (normalized, leading column leftmost nonzero).
  // Returns false if the row reduced to zero.
  bool add_row(SparseRow row) {
    reduce(row);
    if (row.empty()) return false;
    // normalize so that the pivot entry is 1
    Scalar inv = Scalar::one(ctx_) / row.front().second;
    for (auto& [c, v] : row) v *= inv;
    int pc = row.front().first;
    // eliminate the new pivot column from existing rows
    for (auto& pr : rows_) {
      Scalar coeff = get(pr, pc);
      if (!coeff.is_zero()) axpy(pr, -coeff, row);
    }
    pivot_of_col_[pc] = (int)rows_.size();
    rows_.push_back(std::move(row));
    return true;
  }

  int rank() const { return (int)rows_.size(); }
  int ncols() const { return ncols_; }
  const std::vector<SparseRow>& rows() const { return rows_; }

  std::vector<int> pivot_cols() const {
    std::vector<int> p;
    for (const auto& r : rows_) p.push_back(r.front().first);
    std::sort(p.begin(), p.end());
    return p;
  }

  bool is_pivot_col(int c) const { return pivot_of_col_.count(c) > 0; }

  // Kernel basis, reduced-echelon convention: one vector per free column,
  // free columns in ascending order; vector has 1 at its free column and
  // minus the pivot-row entries at the pivot columns.
  std::vector<std::vector<Scalar>> kernel_basis() const {
    std::vector<std::vector<Scalar>> basis;
    for (int c = 0; c < ncols_; ++c) {
      if (is_pivot_col(c)) continue;
      std::vector<Scalar> v(ncols_, Scalar::zero(ctx_));
      v[c] = Scalar::one(ctx_);
      for (const auto& r : rows_) {
        Scalar e = get(r, c);
        if (!e.is_zero()) v[r.front().first] = -e;
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // Express vec over the pivot rows if possible: vec - sum coeff_i row_i == 0.
  // Returns nullopt if vec is not in the row span.
  std::optional<std::vector<Scalar>> express(SparseRow vec) const {
    std::vector<Scalar> coeffs(rows_.size(), Scalar::zero(ctx_));
    while (!vec.empty()) {
      int c = vec.front().first;
      auto it = pivot_of_col_.find(c);
      if (it == pivot_of_col_.end()) return std::nullopt;
      Scalar cf = vec.front().second;
      coeffs[it->second] = cf;
      axpy(vec, -cf, rows_[it->second]);
    }
    return coeffs;
  }

  // Fully reduce a row against the installed pivot rows (all pivot columns
  // cleared, not just the leading one).
  void reduce(SparseRow& row) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [c, v] : row) {
        auto it = pivot_of_col_.find(c);
        if (it != pivot_of_col_.end()) {
          axpy(row, -v, rows_[it->second]);
          changed = true;
          break;
        }
      }
    }
  }

 private:
  Ctx ctx_;
  int ncols_;
  std::vector<SparseRow> rows_;
  std::map<int, int> pivot_of_col_;

  static Scalar get(const SparseRow& r, int c) {
    auto it = std::lower_bound(r.begin(), r.end(), c,
                               [](const auto& p, int cc) { return p.first < cc; });
    if (it != r.end() && it->first == c) return it->second;
    return Scalar();  // only used when known nonzero or compared via is_zero
  }
  static void axpy(SparseRow& dst, const Scalar& a, const SparseRow& src) {
    SparseRow out;
    out.reserve(dst.size() + src.size());
    size_t i = 0, j = 0;
    while (i < dst.size() && j < src.size()) {
      if (dst[i].first < src[j].first)
        out.push_back(dst[i++]);
      else if (dst[i].first > src[j].first) {
        Scalar v = a * src[j].second;
        if (!v.is_zero()) out.emplace_back(src[j].first, std::move(v));
        ++j;
      } else {
        Scalar v = dst[i].second + a * src[j].second;
        if (!v.is_zero()) out.emplace_back(dst[i].first, std::move(v));
        ++i, ++j;
      }
    }
    while (i < dst.size()) out.push_back(dst[i++]);
    while (j < src.size()) {
      Scalar v = a * src[j].second;
      if (!v.is_zero()) out.emplace_back(src[j].first, std::move(v));
      ++j;
    }
    dst = std::move(out);
  }

  friend Scalar reducer_get(const SparseRow& r, int c);
};

inline SparseRow dense_to_sparse(const Tensor& m, int r) {
  SparseRow row;
  for (int c = 0; c < m.cols(); ++c)
    if (!m.at(r, c).is_zero()) row.emplace_back(c, m.at(r, c));
  return row;
}

struct KernelResult {
  int rank;
  std::vector<std::vector<Scalar>> basis;
};

inline KernelResult kernel_and_rank(const Tensor& m) {
  Reducer red(m.ctx(), m.cols());
  for (int r = 0; r < m.rows(); ++r) red.add_row(dense_to_sparse(m, r));
  return {red.rank(), red.kernel_basis()};
}

inline int rank_of(const Tensor& m) {
  Reducer red(m.ctx(), m.cols());
  for (int r = 0; r < m.rows(); ++r) red.add_row(dense_to_sparse(m, r));
  return red.rank();
}

// ----- affine systems -----

struct LinearSystem {
  Tensor matrix;                      // coefficient matrix
  Tensor rhs;                         // column vector
  std::vector<std::string> unknowns;  // optional labels
};

enum class SolveStatus { Unique, Family, Inconsistent };

struct SolveResult {
  SolveStatus status;
  std::vector<Scalar> particular;               // valid unless Inconsistent
  std::vector<std::vector<Scalar>> kernel;      // nonempty iff Family
};

inline SolveResult solve_affine(const LinearSystem& sys) {
  const Tensor& A = sys.matrix;
  const Tensor& b = sys.rhs;
  if (A.rows() != b.rows()) throw std::invalid_argument("solve_affine: rhs dimension");
  const Ctx& ctx = A.ctx();
  int n = A.cols();
  // Collect the augmented rows (unknown columns 0..n-1, rhs at column n).
  std::vector<SparseRow> rows;
  rows.reserve(A.rows());
  for (int r = 0; r < A.rows(); ++r) {
    SparseRow row = dense_to_sparse(A, r);
    if (!b.at(r, 0).is_zero()) row.emplace_back(n, b.at(r, 0));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  // Processing order matters only for cost, not for the result (the reduced
  // echelon form of a row space is unique): feed structurally simple rows
  // first, and among them prefer rows that are independent at a rational
  // sample point, so redundant complicated rows reduce against cheap pivots
  // instead of becoming pivots themselves.
  std::vector<int> order(rows.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
  std::vector<size_t> weight(rows.size(), 0);
  for (size_t i = 0; i < rows.size(); ++i)
    for (const auto& [c, v] : rows[i])
      weight[i] += v.num().t.size() + v.den().t.size();
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return weight[x] < weight[y]; });
  // numeric greedy pre-pass at a fixed rational sample (retried if a
  // denominator vanishes there); failure just leaves the weight order
  std::vector<int> selected, rest;
  bool presel = false;
  static const long snum[2][kMaxVars] = {{3, 5, 7, 11, 13, 17, 19, 23},
                                         {5, 7, 11, 13, 17, 19, 23, 29}};
  static const long sden[2][kMaxVars] = {{2, 3, 4, 5, 6, 7, 8, 9},
                                         {3, 4, 5, 6, 7, 9, 10, 11}};
  for (int attempt = 0; attempt < 2 && !presel; ++attempt) {
    std::vector<mpq_class> pt(kMaxVars);
    for (int v = 0; v < kMaxVars; ++v) pt[v] = mpq_class(snum[attempt][v], sden[attempt][v]);
    try {
      std::vector<std::vector<mpq_class>> piv;   // numeric pivot rows, dense n+1
      std::vector<int> pivcol;
      selected.clear();
      rest.clear();
      for (int idx : order) {
        std::vector<mpq_class> num(n + 1, 0);
        for (const auto& [c, v] : rows[idx]) num[c] = v.eval(pt);
        for (size_t k = 0; k < piv.size(); ++k) {
          if (num[pivcol[k]] == 0) continue;
          mpq_class f = num[pivcol[k]];
          for (int c = pivcol[k]; c <= n; ++c) num[c] -= f * piv[k][c];
        }
        int pc = -1;
        for (int c = 0; c <= n; ++c)
          if (num[c] != 0) { pc = c; break; }
        if (pc < 0) {
          rest.push_back(idx);
          continue;
        }
        mpq_class inv = 1 / num[pc];
        for (int c = pc; c <= n; ++c) num[c] *= inv;
        piv.push_back(std::move(num));
        pivcol.push_back(pc);
        selected.push_back(idx);
      }
      presel = true;
    } catch (const PoleError&) { /* sample hit a pole; retry */ }
  }
  if (!presel) { selected = order; rest.clear(); }
  Reducer red(ctx, n + 1);
  for (int idx : selected) red.add_row(std::move(rows[idx]));
  for (int idx : rest) red.add_row(std::move(rows[idx]));
  if (red.is_pivot_col(n)) return {SolveStatus::Inconsistent, {}, {}};
  std::vector<Scalar> part(n, Scalar::zero(ctx));
  for (const auto& r : red.rows()) {
    // pivot row: x_{pivot} + sum(free terms) = rhs entry
    int pc = r.front().first;
    Scalar v = Scalar::zero(ctx);
    if (!r.empty() && r.back().first == n) v = r.back().second;
    part[pc] = v;  // free unknowns set to zero
  }
  // kernel of A: reuse the reduction, dropping the rhs column
  std::vector<std::vector<Scalar>> kb;
  for (int c = 0; c < n; ++c) {
    if (red.is_pivot_col(c)) continue;
    std::vector<Scalar> v(n, Scalar::zero(ctx));
    v[c] = Scalar::one(ctx);
    for (const auto& r : red.rows()) {
      int pc = r.front().first;
      for (const auto& [cc, vv] : r)
        if (cc == c) v[pc] = -vv;
    }
    kb.push_back(std::move(v));
  }
  if (kb.empty()) return {SolveStatus::Unique, std::move(part), {}};
  return {SolveStatus::Family, std::move(part), std::move(kb)};
}

// ----- determinant (fraction-free Bareiss on a denominator-cleared copy) ----

inline Scalar det(const Tensor& m0) {
  if (m0.rows() != m0.cols()) throw std::invalid_argument("det: square required");
  const Ctx& ctx = m0.ctx();
  int n = m0.rows();
  if (n == 0) return Scalar::one(ctx);
  Tensor m = m0;
  Scalar sign = Scalar::one(ctx);
  Scalar prev = Scalar::one(ctx);
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k).is_zero()) {
      int p = -1;
      for (int r = k + 1; r < n; ++r)
        if (!m.at(r, k).is_zero()) {
          p = r;
          break;
        }
      if (p < 0) return Scalar::zero(ctx);
      for (int c = 0; c < n; ++c) std::swap(m.at(k, c), m.at(p, c));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

inline Tensor inverse(const Tensor& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse: square required");
  const Ctx& ctx = m.ctx();
  int n = m.rows();
  // augmented RREF [m | I]
  Reducer red(ctx, 2 * n);
  for (int r = 0; r < n; ++r) {
    SparseRow row = dense_to_sparse(m, r);
    row.emplace_back(n + r, Scalar::one(ctx));
    red.add_row(std::move(row));
  }
  Tensor inv(ctx, n, n, {m.sig().col, m.sig().row});
  for (const auto& r : red.rows()) {
    int pc = r.front().first;
    if (pc >= n) throw std::domain_error("inverse: singular matrix");
    for (const auto& [c, v] : r)
      if (c >= n) inv.at(pc, c - n) = v;
  }
  if (red.rank() != n) throw std::domain_error("inverse: singular matrix");
  return inv;
}

}  // namespace qgv
