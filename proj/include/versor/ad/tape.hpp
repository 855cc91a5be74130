#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "versor/algebra/grade_pairs.hpp"
#include "versor/algebra/signature.hpp"
#include "versor/common/real.hpp"

namespace versor::ad {

using NodeId = std::int32_t;

// Append-only reverse-mode tape, define-by-run: each node computes its value
// eagerly on creation. Values are row-major rows x cols arrays; multivectors
// travel as 1 x dim rows. backward() walks the tape once in reverse.
class Tape {
 public:
  explicit Tape(const Signature& sig);
  ~Tape();
  Tape(Tape&&) noexcept;
  Tape& operator=(Tape&&) noexcept;

  const Signature& sig() const { return *sig_; }

  // Sources. Leaves expect gradients; constants never receive them.
  NodeId leaf(std::span<const real> v, int rows, int cols);
  NodeId constant(std::span<const real> v, int rows, int cols);
  NodeId scalar_constant(real v);

  // Elementwise.
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId scale(NodeId a, real factor);
  NodeId scale_by(NodeId a, NodeId scalar_node);

  // Dense linear algebra.
  NodeId matmul(NodeId a, NodeId b);
  NodeId concat_rows(std::span<const NodeId> rows);
  NodeId slice_row(NodeId a, int row);

  // Geometric ops (operands are 1 x dim multivector rows).
  NodeId gp(NodeId a, NodeId b);
  NodeId rev(NodeId a);
  NodeId grade_proj(NodeId a, int grade);
  NodeId scalar_norm(NodeId a);
  // psi / sqrt(<psi psi~>_0), guarded: the norm is floored at 1e-12 so the
  // backward pass stays finite when a state collapses.
  NodeId normalize(NodeId a);
  // Full multivector inverse (routed through the matrix isomorphism).
  NodeId inverse(NodeId a);
  // 1 x 10 bivector coefficients -> 1 x dim multivector.
  NodeId bivector_embed(NodeId a);

  // Attention building blocks. q, k are L x dim; both maps are L x L.
  // pair_scalar(i, j) = <q_i reverse(k_j)>_0;
  // pair_bivmag(i, j) = euclidean norm of the grade-2 part of q_i reverse(k_j).
  NodeId pair_scalar(NodeId q, NodeId k);
  NodeId pair_bivmag(NodeId q, NodeId k);
  NodeId softmax_rows(NodeId a);

  // Mean squared error over all entries; 1 x 1.
  NodeId mse(NodeId pred, NodeId target);

  int rows(NodeId n) const;
  int cols(NodeId n) const;
  const std::vector<real>& val(NodeId n) const;
  real scalar_val(NodeId n) const;
  std::size_t size() const;

  // Reverse sweep from a 1 x 1 root. Gradients of earlier backward calls are
  // discarded.
  void backward(NodeId root);
  const std::vector<real>& grad(NodeId n) const;

 private:
  struct Node;
  NodeId push(Node&& n);
  std::vector<real>& adj(NodeId n);

  const Signature* sig_;
  std::vector<Node> nodes_;
  std::vector<std::vector<real>> adj_;
  Grade2Pairs grade2_pairs_;
};

}  // namespace versor::ad
