#include "versor/ad/tape.hpp"

#include <cmath>
#include <cstring>

#include "versor/algebra/blade.hpp"
#include "versor/algebra/engines.hpp"
#include "versor/algebra/multivector.hpp"
#include "versor/common/errors.hpp"
#include "versor/conformal/conformal.hpp"

namespace versor::ad {

namespace {

constexpr real kNormFloor = real(1e-12);

// adj_x[i] += sum_j w(i,j) g[i xor j] y[j]  (gradient through the left factor
// of z = x y; the same Cayley weights reappear, just re-indexed).
void gp_adj_left(const Signature& sig, const real* g, const real* y, real* adj_x) {
  const std::uint32_t dim = sig.dim();
  for (std::uint32_t i = 0; i < dim; ++i) {
    real acc = 0;
    for (std::uint32_t j = 0; j < dim; ++j)
      acc += basis_product(i, j, sig).weight * g[i ^ j] * y[j];
    adj_x[i] += acc;
  }
}

// adj_y[j] += sum_i w(i,j) g[i xor j] x[i].
void gp_adj_right(const Signature& sig, const real* g, const real* x, real* adj_y) {
  const std::uint32_t dim = sig.dim();
  for (std::uint32_t j = 0; j < dim; ++j) {
    real acc = 0;
    for (std::uint32_t i = 0; i < dim; ++i)
      acc += basis_product(i, j, sig).weight * g[i ^ j] * x[i];
    adj_y[j] += acc;
  }
}

}  // namespace

enum class Op : std::uint8_t {
  Leaf,
  Constant,
  Add,
  Sub,
  Scale,
  ScaleBy,
  MatMul,
  ConcatRows,
  SliceRow,
  Gp,
  Rev,
  GradeProj,
  ScalarNorm,
  Normalize,
  Inverse,
  BivEmbed,
  PairScalar,
  PairBivMag,
  SoftmaxRows,
  Mse,
};

struct Tape::Node {
  Op op;
  int rows = 1, cols = 1;
  real aux = 0;
  int iaux = 0;
  std::vector<NodeId> parents;
  std::vector<real> val;
  std::vector<real> cache;
};

Tape::~Tape() = default;
Tape::Tape(Tape&&) noexcept = default;
Tape& Tape::operator=(Tape&&) noexcept = default;

Tape::Tape(const Signature& sig)
    : sig_(&sig), grade2_pairs_(build_grade2_pairs(sig)) {}

NodeId Tape::push(Node&& n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

std::size_t Tape::size() const { return nodes_.size(); }

int Tape::rows(NodeId n) const { return nodes_[n].rows; }
int Tape::cols(NodeId n) const { return nodes_[n].cols; }
const std::vector<real>& Tape::val(NodeId n) const { return nodes_[n].val; }

real Tape::scalar_val(NodeId n) const {
  if (nodes_[n].val.size() != 1)
    throw ContractError("Tape: scalar_val on a non-scalar node");
  return nodes_[n].val[0];
}

const std::vector<real>& Tape::grad(NodeId n) const {
  if (static_cast<std::size_t>(n) >= adj_.size())
    throw ContractError("Tape: grad before backward");
  return adj_[n];
}

std::vector<real>& Tape::adj(NodeId n) {
  if (adj_[n].empty()) adj_[n].assign(nodes_[n].val.size(), real(0));
  return adj_[n];
}

NodeId Tape::leaf(std::span<const real> v, int rows, int cols) {
  if (static_cast<int>(v.size()) != rows * cols)
    throw ContractError("Tape: leaf shape mismatch");
  Node n{Op::Leaf};
  n.rows = rows;
  n.cols = cols;
  n.val.assign(v.begin(), v.end());
  return push(std::move(n));
}

NodeId Tape::constant(std::span<const real> v, int rows, int cols) {
  const NodeId id = leaf(v, rows, cols);
  nodes_[id].op = Op::Constant;
  return id;
}

NodeId Tape::scalar_constant(real v) {
  return constant(std::span<const real>(&v, 1), 1, 1);
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.rows != nb.rows || na.cols != nb.cols)
    throw ContractError("Tape: add shape mismatch");
  Node n{Op::Add};
  n.rows = na.rows;
  n.cols = na.cols;
  n.parents = {a, b};
  n.val.resize(na.val.size());
  for (std::size_t k = 0; k < n.val.size(); ++k)
    n.val[k] = na.val[k] + nb.val[k];
  return push(std::move(n));
}

NodeId Tape::sub(NodeId a, NodeId b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.rows != nb.rows || na.cols != nb.cols)
    throw ContractError("Tape: sub shape mismatch");
  Node n{Op::Sub};
  n.rows = na.rows;
  n.cols = na.cols;
  n.parents = {a, b};
  n.val.resize(na.val.size());
  for (std::size_t k = 0; k < n.val.size(); ++k)
    n.val[k] = na.val[k] - nb.val[k];
  return push(std::move(n));
}

NodeId Tape::scale(NodeId a, real factor) {
  const Node& na = nodes_[a];
  Node n{Op::Scale};
  n.rows = na.rows;
  n.cols = na.cols;
  n.aux = factor;
  n.parents = {a};
  n.val.resize(na.val.size());
  for (std::size_t k = 0; k < n.val.size(); ++k) n.val[k] = na.val[k] * factor;
  return push(std::move(n));
}

NodeId Tape::scale_by(NodeId a, NodeId scalar_node) {
  const Node& na = nodes_[a];
  const Node& ns = nodes_[scalar_node];
  if (ns.val.size() != 1)
    throw ContractError("Tape: scale_by expects a 1x1 scale");
  Node n{Op::ScaleBy};
  n.rows = na.rows;
  n.cols = na.cols;
  n.parents = {a, scalar_node};
  n.val.resize(na.val.size());
  const real s = ns.val[0];
  for (std::size_t k = 0; k < n.val.size(); ++k) n.val[k] = na.val[k] * s;
  return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.cols != nb.rows) throw ContractError("Tape: matmul inner dim mismatch");
  Node n{Op::MatMul};
  n.rows = na.rows;
  n.cols = nb.cols;
  n.parents = {a, b};
  n.val.assign(static_cast<std::size_t>(n.rows) * n.cols, real(0));
  for (int i = 0; i < na.rows; ++i)
    for (int k = 0; k < na.cols; ++k) {
      const real aik = na.val[i * na.cols + k];
      if (aik == real(0)) continue;
      for (int j = 0; j < nb.cols; ++j)
        n.val[i * n.cols + j] += aik * nb.val[k * nb.cols + j];
    }
  return push(std::move(n));
}

NodeId Tape::concat_rows(std::span<const NodeId> parts) {
  if (parts.empty()) throw ContractError("Tape: concat_rows of nothing");
  const int c = nodes_[parts[0]].cols;
  int total = 0;
  for (NodeId p : parts) {
    if (nodes_[p].cols != c)
      throw ContractError("Tape: concat_rows column mismatch");
    total += nodes_[p].rows;
  }
  Node n{Op::ConcatRows};
  n.rows = total;
  n.cols = c;
  n.parents.assign(parts.begin(), parts.end());
  n.val.reserve(static_cast<std::size_t>(total) * c);
  for (NodeId p : parts)
    n.val.insert(n.val.end(), nodes_[p].val.begin(), nodes_[p].val.end());
  return push(std::move(n));
}

NodeId Tape::slice_row(NodeId a, int row) {
  const Node& na = nodes_[a];
  if (row < 0 || row >= na.rows) throw ContractError("Tape: slice_row range");
  Node n{Op::SliceRow};
  n.rows = 1;
  n.cols = na.cols;
  n.iaux = row;
  n.parents = {a};
  n.val.assign(na.val.begin() + static_cast<std::size_t>(row) * na.cols,
               na.val.begin() + static_cast<std::size_t>(row + 1) * na.cols);
  return push(std::move(n));
}

NodeId Tape::gp(NodeId a, NodeId b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  const int dim = static_cast<int>(sig_->dim());
  if (na.rows != 1 || nb.rows != 1 || na.cols != dim || nb.cols != dim)
    throw ContractError("Tape: gp expects 1 x dim multivectors");
  Node n{Op::Gp};
  n.rows = 1;
  n.cols = dim;
  n.parents = {a, b};
  n.val.assign(dim, real(0));
  gp_bitmask_kernel(*sig_, na.val.data(), nb.val.data(), n.val.data());
  return push(std::move(n));
}

NodeId Tape::rev(NodeId a) {
  const Node& na = nodes_[a];
  const int dim = static_cast<int>(sig_->dim());
  if (na.cols != dim)
    throw ContractError("Tape: rev expects rows of dim coefficients");
  Node n{Op::Rev};
  n.rows = na.rows;
  n.cols = dim;
  n.parents = {a};
  n.val.resize(na.val.size());
  for (int r = 0; r < na.rows; ++r)
    for (int k = 0; k < dim; ++k)
      n.val[r * dim + k] =
          reversion_sign(static_cast<std::uint32_t>(k)) * na.val[r * dim + k];
  return push(std::move(n));
}

NodeId Tape::grade_proj(NodeId a, int g) {
  const Node& na = nodes_[a];
  const int dim = static_cast<int>(sig_->dim());
  if (na.rows != 1 || na.cols != dim)
    throw ContractError("Tape: grade_proj expects a 1 x dim multivector");
  if (g < 0 || g > sig_->n()) throw ContractError("Tape: grade out of range");
  Node n{Op::GradeProj};
  n.rows = 1;
  n.cols = dim;
  n.iaux = g;
  n.parents = {a};
  n.val.assign(dim, real(0));
  for (int k = 0; k < dim; ++k)
    if (grade(static_cast<std::uint32_t>(k)) == g) n.val[k] = na.val[k];
  return push(std::move(n));
}

NodeId Tape::scalar_norm(NodeId a) {
  const Node& na = nodes_[a];
  const int dim = static_cast<int>(sig_->dim());
  if (na.rows != 1 || na.cols != dim)
    throw ContractError("Tape: scalar_norm expects a 1 x dim multivector");
  Node n{Op::ScalarNorm};
  n.parents = {a};
  real acc = 0;
  for (int k = 0; k < dim; ++k)
    acc += sig_->blade_norm_sign(static_cast<std::uint32_t>(k)) * na.val[k] * na.val[k];
  n.val = {acc};
  return push(std::move(n));
}

NodeId Tape::normalize(NodeId a) {
  const Node& na = nodes_[a];
  const int dim = static_cast<int>(sig_->dim());
  if (na.rows != 1 || na.cols != dim)
    throw ContractError("Tape: normalize expects a 1 x dim multivector");
  Node n{Op::Normalize};
  n.rows = 1;
  n.cols = dim;
  n.parents = {a};
  real norm = 0;
  for (int k = 0; k < dim; ++k)
    norm += sig_->blade_norm_sign(static_cast<std::uint32_t>(k)) * na.val[k] * na.val[k];
  const bool guarded = !(norm > kNormFloor);
  const real s = std::sqrt(guarded ? kNormFloor : norm);
  n.iaux = guarded ? 1 : 0;
  n.aux = s;
  n.val.resize(dim);
  for (int k = 0; k < dim; ++k) n.val[k] = na.val[k] / s;
  return push(std::move(n));
}

NodeId Tape::inverse(NodeId a) {
  const Node& na = nodes_[a];
  const int dim = static_cast<int>(sig_->dim());
  if (na.rows != 1 || na.cols != dim)
    throw ContractError("Tape: inverse expects a 1 x dim multivector");
  Node n{Op::Inverse};
  n.rows = 1;
  n.cols = dim;
  n.parents = {a};
  Multivector m(*sig_, std::vector<real>(na.val.begin(), na.val.end()));
  const Multivector inv = cga::mv_inverse(m);
  n.val.assign(inv.coeffs().begin(), inv.coeffs().end());
  return push(std::move(n));
}

NodeId Tape::bivector_embed(NodeId a) {
  const Node& na = nodes_[a];
  const int m = static_cast<int>(grade2_pairs_.masks.size());
  if (na.rows != 1 || na.cols != m)
    throw ContractError("Tape: bivector_embed expects one grade-2 coefficient row");
  const int dim = static_cast<int>(sig_->dim());
  Node n{Op::BivEmbed};
  n.rows = 1;
  n.cols = dim;
  n.parents = {a};
  n.val.assign(dim, real(0));
  for (int k = 0; k < m; ++k) n.val[grade2_pairs_.masks[k]] = na.val[k];
  return push(std::move(n));
}

NodeId Tape::pair_scalar(NodeId q, NodeId k) {
  const Node& nq = nodes_[q];
  const Node& nk = nodes_[k];
  const int dim = static_cast<int>(sig_->dim());
  if (nq.cols != dim || nk.cols != dim)
    throw ContractError("Tape: pair_scalar expects rows of dim coefficients");
  Node n{Op::PairScalar};
  n.rows = nq.rows;
  n.cols = nk.rows;
  n.parents = {q, k};
  n.val.assign(static_cast<std::size_t>(n.rows) * n.cols, real(0));
  for (int i = 0; i < nq.rows; ++i)
    for (int j = 0; j < nk.rows; ++j)
      n.val[i * n.cols + j] = scalar_product_fast_kernel(
          *sig_, nq.val.data() + static_cast<std::size_t>(i) * dim,
          nk.val.data() + static_cast<std::size_t>(j) * dim);
  return push(std::move(n));
}

NodeId Tape::pair_bivmag(NodeId q, NodeId k) {
  const Node& nq = nodes_[q];
  const Node& nk = nodes_[k];
  const int dim = static_cast<int>(sig_->dim());
  if (nq.cols != dim || nk.cols != dim)
    throw ContractError("Tape: pair_bivmag expects rows of dim coefficients");
  Node n{Op::PairBivMag};
  n.rows = nq.rows;
  n.cols = nk.rows;
  n.parents = {q, k};
  const int nm = static_cast<int>(grade2_pairs_.masks.size());
  n.val.assign(static_cast<std::size_t>(n.rows) * n.cols, real(0));
  n.cache.assign(static_cast<std::size_t>(n.rows) * n.cols * nm, real(0));
  for (int i = 0; i < nq.rows; ++i)
    for (int j = 0; j < nk.rows; ++j) {
      real* c = n.cache.data() + (static_cast<std::size_t>(i) * n.cols + j) * nm;
      const real* qi = nq.val.data() + static_cast<std::size_t>(i) * dim;
      const real* kj = nk.val.data() + static_cast<std::size_t>(j) * dim;
      for (const auto& e : grade2_pairs_.entries) c[e.slot] += e.w * qi[e.p] * kj[e.q];
      real sq = 0;
      for (int m = 0; m < nm; ++m) sq += c[m] * c[m];
      n.val[i * n.cols + j] = std::sqrt(sq);
    }
  return push(std::move(n));
}

NodeId Tape::softmax_rows(NodeId a) {
  const Node& na = nodes_[a];
  Node n{Op::SoftmaxRows};
  n.rows = na.rows;
  n.cols = na.cols;
  n.parents = {a};
  n.val.resize(na.val.size());
  for (int i = 0; i < na.rows; ++i) {
    const real* src = na.val.data() + static_cast<std::size_t>(i) * na.cols;
    real* dst = n.val.data() + static_cast<std::size_t>(i) * na.cols;
    real hi = src[0];
    for (int j = 1; j < na.cols; ++j) hi = std::max(hi, src[j]);
    real sum = 0;
    for (int j = 0; j < na.cols; ++j) {
      dst[j] = std::exp(src[j] - hi);
      sum += dst[j];
    }
    for (int j = 0; j < na.cols; ++j) dst[j] /= sum;
  }
  return push(std::move(n));
}

NodeId Tape::mse(NodeId pred, NodeId target) {
  const Node& np = nodes_[pred];
  const Node& nt = nodes_[target];
  if (np.rows != nt.rows || np.cols != nt.cols)
    throw ContractError("Tape: mse shape mismatch");
  Node n{Op::Mse};
  n.parents = {pred, target};
  real acc = 0;
  for (std::size_t k = 0; k < np.val.size(); ++k) {
    const real d = np.val[k] - nt.val[k];
    acc += d * d;
  }
  n.val = {acc / static_cast<real>(np.val.size())};
  return push(std::move(n));
}

void Tape::backward(NodeId root) {
  const Node& nr = nodes_[root];
  if (nr.val.size() != 1)
    throw ContractError("Tape: backward root must be scalar");
  adj_.clear();
  adj_.resize(nodes_.size());
  adj(root)[0] = real(1);

  const int dim = static_cast<int>(sig_->dim());
  for (NodeId id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (adj_[id].empty()) continue;
    const std::vector<real>& g = adj_[id];
    switch (n.op) {
      case Op::Leaf:
      case Op::Constant:
        break;
      case Op::Add: {
        auto& ga = adj(n.parents[0]);
        auto& gb = adj(n.parents[1]);
        for (std::size_t k = 0; k < g.size(); ++k) {
          ga[k] += g[k];
          gb[k] += g[k];
        }
        break;
      }
      case Op::Sub: {
        auto& ga = adj(n.parents[0]);
        auto& gb = adj(n.parents[1]);
        for (std::size_t k = 0; k < g.size(); ++k) {
          ga[k] += g[k];
          gb[k] -= g[k];
        }
        break;
      }
      case Op::Scale: {
        auto& ga = adj(n.parents[0]);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.aux;
        break;
      }
      case Op::ScaleBy: {
        const auto& va = nodes_[n.parents[0]].val;
        const real s = nodes_[n.parents[1]].val[0];
        auto& ga = adj(n.parents[0]);
        auto& gs = adj(n.parents[1]);
        real acc = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
          ga[k] += g[k] * s;
          acc += g[k] * va[k];
        }
        gs[0] += acc;
        break;
      }
      case Op::MatMul: {
        const Node& na = nodes_[n.parents[0]];
        const Node& nb = nodes_[n.parents[1]];
        auto& ga = adj(n.parents[0]);
        auto& gb = adj(n.parents[1]);
        // dA = G B^T, dB = A^T G.
        for (int i = 0; i < na.rows; ++i)
          for (int k = 0; k < na.cols; ++k) {
            real acc = 0;
            for (int j = 0; j < nb.cols; ++j)
              acc += g[i * n.cols + j] * nb.val[k * nb.cols + j];
            ga[i * na.cols + k] += acc;
          }
        for (int k = 0; k < na.cols; ++k)
          for (int j = 0; j < nb.cols; ++j) {
            real acc = 0;
            for (int i = 0; i < na.rows; ++i)
              acc += na.val[i * na.cols + k] * g[i * n.cols + j];
            gb[k * nb.cols + j] += acc;
          }
        break;
      }
      case Op::ConcatRows: {
        std::size_t off = 0;
        for (NodeId p : n.parents) {
          auto& gp_ = adj(p);
          for (std::size_t k = 0; k < gp_.size(); ++k) gp_[k] += g[off + k];
          off += gp_.size();
        }
        break;
      }
      case Op::SliceRow: {
        auto& ga = adj(n.parents[0]);
        const std::size_t off = static_cast<std::size_t>(n.iaux) * n.cols;
        for (int k = 0; k < n.cols; ++k) ga[off + k] += g[k];
        break;
      }
      case Op::Gp: {
        const auto& va = nodes_[n.parents[0]].val;
        const auto& vb = nodes_[n.parents[1]].val;
        gp_adj_left(*sig_, g.data(), vb.data(), adj(n.parents[0]).data());
        gp_adj_right(*sig_, g.data(), va.data(), adj(n.parents[1]).data());
        break;
      }
      case Op::Rev: {
        auto& ga = adj(n.parents[0]);
        for (int r = 0; r < n.rows; ++r)
          for (int k = 0; k < dim; ++k)
            ga[r * dim + k] +=
                reversion_sign(static_cast<std::uint32_t>(k)) * g[r * dim + k];
        break;
      }
      case Op::GradeProj: {
        auto& ga = adj(n.parents[0]);
        for (int k = 0; k < dim; ++k)
          if (grade(static_cast<std::uint32_t>(k)) == n.iaux) ga[k] += g[k];
        break;
      }
      case Op::ScalarNorm: {
        const auto& va = nodes_[n.parents[0]].val;
        auto& ga = adj(n.parents[0]);
        for (int k = 0; k < dim; ++k)
          ga[k] += real(2) * sig_->blade_norm_sign(static_cast<std::uint32_t>(k)) *
                   va[k] * g[0];
        break;
      }
      case Op::Normalize: {
        const auto& va = nodes_[n.parents[0]].val;
        auto& ga = adj(n.parents[0]);
        const real s = n.aux;
        if (n.iaux) {
          // Guarded branch: the divisor is a constant floor.
          for (int k = 0; k < dim; ++k) ga[k] += g[k] / s;
        } else {
          real gdotv = 0;
          for (int k = 0; k < dim; ++k) gdotv += g[k] * va[k];
          const real s3 = s * s * s;
          for (int k = 0; k < dim; ++k)
            ga[k] += g[k] / s - gdotv *
                                    sig_->blade_norm_sign(
                                        static_cast<std::uint32_t>(k)) *
                                    va[k] / s3;
        }
        break;
      }
      case Op::Inverse: {
        // d(a^-1) = -a^-1 da a^-1, so the adjoint pulls G through two
        // products with the cached inverse u.
        const auto& u = n.val;
        std::vector<real> t1(dim, real(0));
        gp_adj_right(*sig_, g.data(), u.data(), t1.data());
        std::vector<real> t2(dim, real(0));
        gp_adj_left(*sig_, t1.data(), u.data(), t2.data());
        auto& ga = adj(n.parents[0]);
        for (int k = 0; k < dim; ++k) ga[k] -= t2[k];
        break;
      }
      case Op::BivEmbed: {
        auto& ga = adj(n.parents[0]);
        const int m = static_cast<int>(grade2_pairs_.masks.size());
        for (int k = 0; k < m; ++k) ga[k] += g[grade2_pairs_.masks[k]];
        break;
      }
      case Op::PairScalar: {
        const Node& nq = nodes_[n.parents[0]];
        const Node& nk = nodes_[n.parents[1]];
        auto& gq = adj(n.parents[0]);
        auto& gk = adj(n.parents[1]);
        for (int i = 0; i < nq.rows; ++i)
          for (int j = 0; j < nk.rows; ++j) {
            const real gij = g[i * n.cols + j];
            if (gij == real(0)) continue;
            const real* ki = nk.val.data() + static_cast<std::size_t>(j) * dim;
            const real* qi = nq.val.data() + static_cast<std::size_t>(i) * dim;
            for (int m = 0; m < dim; ++m) {
              const real s = sig_->blade_norm_sign(static_cast<std::uint32_t>(m));
              gq[i * dim + m] += gij * s * ki[m];
              gk[j * dim + m] += gij * s * qi[m];
            }
          }
        break;
      }
      case Op::PairBivMag: {
        const Node& nq = nodes_[n.parents[0]];
        const Node& nk = nodes_[n.parents[1]];
        auto& gq = adj(n.parents[0]);
        auto& gk = adj(n.parents[1]);
        for (int i = 0; i < nq.rows; ++i)
          for (int j = 0; j < nk.rows; ++j) {
            const real gij = g[i * n.cols + j];
            const real mag = n.val[i * n.cols + j];
            if (gij == real(0) || mag == real(0)) continue;
            const int nm = static_cast<int>(grade2_pairs_.masks.size());
            const real* c =
                n.cache.data() + (static_cast<std::size_t>(i) * n.cols + j) * nm;
            real gc[28];  // up to C(8,2) grade-2 blades
            for (int m = 0; m < nm; ++m) gc[m] = gij * c[m] / mag;
            const real* qi = nq.val.data() + static_cast<std::size_t>(i) * dim;
            const real* kj = nk.val.data() + static_cast<std::size_t>(j) * dim;
            for (const auto& e : grade2_pairs_.entries) {
              gq[i * dim + static_cast<int>(e.p)] += gc[e.slot] * e.w * kj[e.q];
              gk[j * dim + static_cast<int>(e.q)] += gc[e.slot] * e.w * qi[e.p];
            }
          }
        break;
      }
      case Op::SoftmaxRows: {
        auto& ga = adj(n.parents[0]);
        for (int i = 0; i < n.rows; ++i) {
          const real* y = n.val.data() + static_cast<std::size_t>(i) * n.cols;
          const real* gy = g.data() + static_cast<std::size_t>(i) * n.cols;
          real dot = 0;
          for (int j = 0; j < n.cols; ++j) dot += gy[j] * y[j];
          for (int j = 0; j < n.cols; ++j)
            ga[i * n.cols + j] += y[j] * (gy[j] - dot);
        }
        break;
      }
      case Op::Mse: {
        const Node& np = nodes_[n.parents[0]];
        const Node& nt = nodes_[n.parents[1]];
        auto& gpred = adj(n.parents[0]);
        const real f = real(2) / static_cast<real>(np.val.size());
        for (std::size_t k = 0; k < np.val.size(); ++k)
          gpred[k] += g[0] * f * (np.val[k] - nt.val[k]);
        // The target side is almost always a constant; still propagate so
        // mse(target, pred) behaves.
        if (nodes_[n.parents[1]].op != Op::Constant) {
          auto& gt = adj(n.parents[1]);
          for (std::size_t k = 0; k < np.val.size(); ++k)
            gt[k] -= g[0] * f * (np.val[k] - nt.val[k]);
        }
        break;
      }
    }
  }
}

}  // namespace versor::ad
