#include "gfbs/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gfbs/errors.hpp"

namespace gfbs {

namespace {

// Tarjan's algorithm. Edge i -> j means block i's equation involves x_j; the
// components come out with every dependency before its dependents.
std::vector<std::vector<Index>> strongly_connected(Index n, const std::function<bool(Index, Index)>& edge) {
  std::vector<Index> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<Index> stack;
  std::vector<std::vector<Index>> out;
  Index counter = 0;
  std::function<void(Index)> visit = [&](Index v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (Index w = 0; w < n; ++w) {
      if (w == v || !edge(v, w)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<Index> comp;
      Index w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(comp);
    }
  };
  for (Index v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return out;
}

std::vector<Index> coords_of(const BlockLayout& L, Index b) {
  std::vector<Index> c(L.size(b));
  for (Index k = 0; k < L.size(b); ++k) c[k] = L.offset(b) + k;
  return c;
}

}  // namespace

StructuredResolvent::StructuredResolvent(const MonotoneBlockOperator& A, const Matrix& Q)
    : terms_(A.terms()), layout_(A.layout()) {
  const Index n = A.dim();
  if (Q.rows() != n || Q.cols() != n) fail(ErrorCode::DimensionMismatch, "metric does not match operator");
  K_ = A.linear_part() + Q;
  c_ = Vector::Zero(n);
  for (Index b = 0; b < layout_.num_blocks(); ++b) {
    const BlockTerm& t = terms_[b];
    if (!t.is_affine()) continue;
    const Index o = layout_.offset(b), m = layout_.size(b);
    K_.block(o, o, m, m) += t.scale * t.fn.affine_hessian(m);
    c_.segment(o, m) = t.scale * t.fn.affine_offset(m);
    if (t.shift.size()) c_.segment(o, m) += t.shift;
  }
  const double zero_tol = 1e-14 * std::max(1.0, K_.size() ? K_.cwiseAbs().maxCoeff() : 0.0);
  auto nonzero = [&](const Matrix& M) { return M.size() && M.cwiseAbs().maxCoeff() > zero_tol; };

  const Index nb = layout_.num_blocks();
  auto block_edge = [&](Index i, Index j) {
    return nonzero(K_.block(layout_.offset(i), layout_.offset(j), layout_.size(i), layout_.size(j)));
  };
  for (const auto& comp : strongly_connected(nb, block_edge)) {
    Stage st;
    std::vector<Index> prox_blocks;
    for (Index b : comp) {
      const auto cs = coords_of(layout_, b);
      auto& dst = terms_[b].is_affine() ? st.affine_coords : st.prox_coords;
      dst.insert(dst.end(), cs.begin(), cs.end());
      if (!terms_[b].is_affine()) prox_blocks.push_back(b);
    }
    st.all_coords = st.affine_coords;
    st.all_coords.insert(st.all_coords.end(), st.prox_coords.begin(), st.prox_coords.end());

    if (!st.affine_coords.empty()) {
      const Matrix KFF = K_(st.affine_coords, st.affine_coords);
      st.affine_solver = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Matrix>>(KFF);
      if (st.affine_solver->rank() < KFF.rows()) {
        if (!prox_blocks.empty())
          fail(ErrorCode::IncompatibleProblem, "singular affine part coupled to nonsmooth blocks");
        selection_ = true;
      }
    }
    if (prox_blocks.empty()) {
      stages_.push_back(std::move(st));
      continue;
    }

    // Schur complement onto the nonsmooth coordinates.
    const Matrix K_PP = K_(st.prox_coords, st.prox_coords);
    if (st.affine_coords.empty()) {
      st.K_red = K_PP;
    } else {
      const Matrix K_PF = K_(st.prox_coords, st.affine_coords);
      st.K_FP = K_(st.affine_coords, st.prox_coords);
      const Matrix KFF_inv = st.affine_solver->pseudoInverse();
      st.K_PF_KFFinv = K_PF * KFF_inv;
      st.K_red = K_PP - st.K_PF_KFFinv * st.K_FP;
    }
    const double red_tol = 1e-12 * std::max(1.0, st.K_red.cwiseAbs().maxCoeff());

    // Local positions of each nonsmooth block inside prox_coords.
    std::vector<std::vector<Index>> local(prox_blocks.size());
    Index pos = 0;
    for (std::size_t k = 0; k < prox_blocks.size(); ++k)
      for (Index m = 0; m < layout_.size(prox_blocks[k]); ++m) local[k].push_back(pos++);
    auto red_edge = [&](Index i, Index j) {
      return st.K_red(local[i], local[j]).cwiseAbs().maxCoeff() > red_tol;
    };
    for (const auto& sub : strongly_connected(static_cast<Index>(prox_blocks.size()), red_edge)) {
      if (sub.size() != 1)
        fail(ErrorCode::IncompatibleProblem, "nonsmooth blocks are coupled beyond a triangular structure");
      const Index k = sub[0];
      const Matrix D = st.K_red(local[k], local[k]);
      const double c = D(0, 0);
      const Matrix off = D - c * Matrix::Identity(D.rows(), D.cols());
      if (!(c > 0.0) || (off.size() && off.cwiseAbs().maxCoeff() > red_tol))
        fail(ErrorCode::IncompatibleProblem,
             "block '" + layout_.name(prox_blocks[k]) + "' has a non-scalar step metric; no closed-form prox");
      st.prox_steps.push_back(ProxStep{prox_blocks[k], local[k], c});
    }
    stages_.push_back(std::move(st));
  }
}

Vector StructuredResolvent::solve(const Vector& r) const {
  if (r.size() != K_.rows()) fail(ErrorCode::DimensionMismatch, "resolvent right-hand side has wrong size");
  Vector x = Vector::Zero(r.size());
  const Vector base = r - c_;
  for (const Stage& st : stages_) {
    // Contributions of already solved components (unsolved entries are still zero).
    const Vector rhs = base(st.all_coords) - K_(st.all_coords, Eigen::all) * x;
    const Index nf = static_cast<Index>(st.affine_coords.size());
    const Vector rhs_F = rhs.head(nf);
    const Vector rhs_P = rhs.tail(static_cast<Index>(st.prox_coords.size()));
    if (st.prox_steps.empty()) {
      const Vector xf = st.affine_solver->solve(rhs_F);
      x(st.affine_coords) = xf;
      continue;
    }
    const Vector rhs_red = nf ? Vector(rhs_P - st.K_PF_KFFinv * rhs_F) : rhs_P;
    Vector xp = Vector::Zero(static_cast<Index>(st.prox_coords.size()));
    for (const ProxStep& step : st.prox_steps) {
      const Vector z = (rhs_red(step.coords) - st.K_red(step.coords, Eigen::all) * xp) / step.c;
      const Vector p = terms_[step.block].prox(1.0 / step.c, z);
      xp(step.coords) = p;
    }
    x(st.prox_coords) = xp;
    if (nf) {
      const Vector xf = st.affine_solver->solve(Vector(rhs_F - st.K_FP * xp));
      x(st.affine_coords) = xf;
    }
  }
  return x;
}

}  // namespace gfbs
