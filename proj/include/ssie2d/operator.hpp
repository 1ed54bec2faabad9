#ifndef SSIE2D_OPERATOR_HPP
#define SSIE2D_OPERATOR_HPP

// Surface admittance operators.
//
// Each object gives one tested relation between boundary E and H
// (A_H H = A_E E). Shared pieces are eliminated pairwise, leaf to root over
// the interface tree, leaving H_outer = Y E_outer. Yhat is the same operator
// for the outer contour filled with background, and Ys = Y - Yhat.
//
// H on a shared piece is always stored with the owner's sign; the neighbour
// sees -H.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssie2d/assembly.hpp"
#include "ssie2d/geometry.hpp"
#include "ssie2d/linalg.hpp"

namespace ssie2d {

struct FieldRelation {
  int object = 0;
  std::vector<int> piece_order;
  Matrix A_E;  // rows and columns both follow piece_order
  Matrix A_H;
};

enum class OperatorKind { Y, Yhat, Ys };

struct SurfaceOperator {
  OperatorKind kind = OperatorKind::Y;
  Matrix matrix;
  std::vector<int> outer_order;
};

// Condition number of one matrix that had to be inverted.
struct CondEntry {
  std::string name;
  Eigen::Index size = 0;
  double cond = 0.0;
};

using CondLog = std::vector<CondEntry>;

namespace detail {

inline void log_cond(CondLog* log, std::string name, const Matrix& m) {
  if (log) log->push_back({std::move(name), m.rows(), cond2(m)});
}

inline std::vector<Eigen::Index> offsets_of(const Scene& scene, const std::vector<int>& pieces) {
  std::vector<Eigen::Index> off;
  Eigen::Index o = 0;
  for (int p : pieces) {
    off.push_back(o);
    o += Eigen::Index(scene.pieces[p].size());
  }
  off.push_back(o);
  return off;
}

}  // namespace detail

// Tested relation of one object: per piece p of the object,
//   L_p E_p + sum_q U_pq E_q = sum_q P_pq H_q
// with the object's medium and normals pointing out of it.
inline FieldRelation object_relation(const Scene& scene, int object) {
  if (object < 0 || std::size_t(object) >= scene.objects.size())
    throw DomainError("object index " + std::to_string(object) + " out of range");
  const auto& obj = scene.objects[object];
  const auto kc = KernelConstants::of(obj.medium, scene.omega());
  FieldRelation rel;
  rel.object = object;
  for (const auto& r : obj.pieces) rel.piece_order.push_back(r.piece);
  const auto off = detail::offsets_of(scene, rel.piece_order);
  const Eigen::Index n = off.back();
  rel.A_E = Matrix::Zero(n, n);
  rel.A_H = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < obj.pieces.size(); ++a) {
    const auto& obs = scene.pieces[obj.pieces[a].piece];
    rel.A_E.block(off[a], off[a], obs.size(), obs.size()) += assemble_L(obs.segments);
    for (std::size_t b = 0; b < obj.pieces.size(); ++b) {
      const auto& src = scene.pieces[obj.pieces[b].piece];
      const double s = obj.pieces[b].normal_sign;
      const auto pu = assemble_PU(obs.segments, src.segments, s, kc);
      rel.A_E.block(off[a], off[b], obs.size(), src.size()) += pu.U;
      rel.A_H.block(off[a], off[b], obs.size(), src.size()) = s * pu.P;
    }
  }
  return rel;
}

// X_E E + X_H H = 0 over a set of pieces. Rows are grouped by tested piece,
// columns by piece (E block then H block, same piece order).
struct Relation {
  std::vector<int> pieces;
  std::vector<Eigen::Index> offsets;  // per piece, plus total
  std::map<int, Eigen::Index> row_offset;
  Matrix XE;
  Matrix XH;

  Eigen::Index cols() const { return offsets.back(); }
  Eigen::Index col(int piece) const {
    const auto it = std::find(pieces.begin(), pieces.end(), piece);
    return offsets[std::size_t(it - pieces.begin())];
  }
};

// Record of one shared-piece elimination: E_s = CE x, H_s = CH x where x is
// [E; H] over `pieces` of the merged relation.
struct EliminationStep {
  int shared_piece = 0;
  int absorbed_object = 0;
  int into_object = 0;
  std::vector<int> pieces;
  std::vector<Eigen::Index> offsets;
  Matrix CE;
  Matrix CH;
};

struct AdmittanceResult {
  SurfaceOperator Y;
  std::vector<EliminationStep> steps;
  Relation final_relation;
};

namespace detail {

inline Relation to_relation(const Scene& scene, const FieldRelation& fr) {
  Relation r;
  r.pieces = fr.piece_order;
  r.offsets = offsets_of(scene, r.pieces);
  for (std::size_t i = 0; i < r.pieces.size(); ++i) r.row_offset[r.pieces[i]] = r.offsets[i];
  r.XE = fr.A_E;
  r.XH = -fr.A_H;
  return r;
}

// Columns of `from` (one half, E or H) rearranged into the layout `to`.
inline Matrix remap_cols(const Matrix& m, const Relation& from, const std::vector<int>& to_pieces,
                         const std::vector<Eigen::Index>& to_off) {
  Matrix out = Matrix::Zero(m.rows(), to_off.back());
  for (std::size_t i = 0; i < from.pieces.size(); ++i) {
    const auto it = std::find(to_pieces.begin(), to_pieces.end(), from.pieces[i]);
    if (it == to_pieces.end()) continue;
    const Eigen::Index w = from.offsets[i + 1] - from.offsets[i];
    out.middleCols(to_off[std::size_t(it - to_pieces.begin())], w) = m.middleCols(from.offsets[i], w);
  }
  return out;
}

// Eliminates piece s shared by a and b; returns the merged relation.
inline Relation eliminate(const Scene& scene, const Relation& a, const Relation& b, int s, EliminationStep& step,
                          CondLog* log) {
  const Eigen::Index ns = Eigen::Index(scene.pieces[s].size());
  // Merged column layout: a's pieces then b's, without s.
  std::vector<int> pieces;
  for (int p : a.pieces)
    if (p != s) pieces.push_back(p);
  for (int p : b.pieces)
    if (p != s && std::find(pieces.begin(), pieces.end(), p) == pieces.end()) pieces.push_back(p);
  const auto off = offsets_of(scene, pieces);
  const Eigen::Index nx = off.back();

  auto split = [&](const Relation& r, Matrix& xe_s, Matrix& xh_s, Matrix& xr) {
    const Eigen::Index cs = r.col(s);
    xe_s = r.XE.middleCols(cs, ns);
    xh_s = r.XH.middleCols(cs, ns);
    xr.resize(r.XE.rows(), 2 * nx);
    xr.leftCols(nx) = remap_cols(r.XE, r, pieces, off);
    xr.rightCols(nx) = remap_cols(r.XH, r, pieces, off);
  };
  Matrix ae, ah, ar, be, bh, br;
  split(a, ae, ah, ar);
  split(b, be, bh, br);

  const Eigen::Index ra = a.row_offset.at(s);
  const Eigen::Index rb = b.row_offset.at(s);
  const std::string tag = "[piece " + std::to_string(s) + "]";

  const Matrix alpha_e = ae.middleRows(ra, ns);
  const Matrix beta_e = be.middleRows(rb, ns);
  const LuFactor lu_a(alpha_e, "A1" + tag);
  const LuFactor lu_b(beta_e, "A2" + tag);
  log_cond(log, "A1" + tag, alpha_e);
  log_cond(log, "A2" + tag, beta_e);
  const Matrix Aa_h = lu_a.solve(ah.middleRows(ra, ns));
  const Matrix Aa_r = lu_a.solve(ar.middleRows(ra, ns));
  const Matrix Ab_h = lu_b.solve(bh.middleRows(rb, ns));
  const Matrix Ab_r = lu_b.solve(br.middleRows(rb, ns));
  const Matrix B = Aa_h - Ab_h;
  log_cond(log, "B1" + tag, B);
  const Matrix CH = -LuFactor(B, "B1" + tag).solve(Aa_r - Ab_r);
  const Matrix CE = -(Aa_h * CH + Aa_r);

  Relation m;
  m.pieces = pieces;
  m.offsets = off;
  const Eigen::Index rows = a.XE.rows() + b.XE.rows() - 2 * ns;
  m.XE.resize(rows, nx);
  m.XH.resize(rows, nx);
  Eigen::Index r = 0;
  auto absorb = [&](const Relation& src, const Matrix& xe_s, const Matrix& xh_s, const Matrix& xr) {
    for (std::size_t i = 0; i < src.pieces.size(); ++i) {
      const int p = src.pieces[i];
      if (p == s) continue;
      const Eigen::Index ro = src.row_offset.at(p);
      const Eigen::Index h = Eigen::Index(scene.pieces[p].size());
      const Matrix full = xr.middleRows(ro, h) + xe_s.middleRows(ro, h) * CE + xh_s.middleRows(ro, h) * CH;
      m.XE.middleRows(r, h) = full.leftCols(nx);
      m.XH.middleRows(r, h) = full.rightCols(nx);
      m.row_offset[p] = r;
      r += h;
    }
  };
  absorb(a, ae, ah, ar);
  absorb(b, be, bh, br);

  step.shared_piece = s;
  step.pieces = pieces;
  step.offsets = off;
  step.CE = CE;
  step.CH = CH;
  return m;
}

}  // namespace detail

// Pairwise elimination of one shared piece, reported in the two-object form
// H_s = C1 H_a + C2 E_a + C3 H_b + C4 E_b, E_s = D1 H_a + D2 E_a + D3 H_b + D4 E_b
// where a/b stand for the remaining pieces of rel1/rel2.
struct SharedElimination {
  Matrix C[4];
  Matrix D[4];
  std::vector<int> pieces_a;
  std::vector<int> pieces_b;
};

inline SharedElimination eliminate_shared_pair(const Scene& scene, const FieldRelation& rel1,
                                               const FieldRelation& rel2, int shared, CondLog* log = nullptr) {
  for (const auto* r : {&rel1, &rel2})
    if (std::find(r->piece_order.begin(), r->piece_order.end(), shared) == r->piece_order.end())
      throw DomainError("piece " + std::to_string(shared) + " is not common to both relations");
  const Relation a = detail::to_relation(scene, rel1);
  const Relation b = detail::to_relation(scene, rel2);
  EliminationStep step;
  detail::eliminate(scene, a, b, shared, step, log);
  SharedElimination out;
  for (int p : rel1.piece_order)
    if (p != shared) out.pieces_a.push_back(p);
  for (int p : rel2.piece_order)
    if (p != shared) out.pieces_b.push_back(p);
  const Eigen::Index nx = step.offsets.back();
  Eigen::Index na = 0;
  for (int p : out.pieces_a) na += Eigen::Index(scene.pieces[p].size());
  const Eigen::Index nb = nx - na;
  // step.pieces lists pieces_a then pieces_b.
  out.C[0] = step.CH.middleCols(nx, na);
  out.C[1] = step.CH.leftCols(na);
  out.C[2] = step.CH.middleCols(nx + na, nb);
  out.C[3] = step.CH.middleCols(na, nb);
  out.D[0] = step.CE.middleCols(nx, na);
  out.D[1] = step.CE.leftCols(na);
  out.D[2] = step.CE.middleCols(nx + na, nb);
  out.D[3] = step.CE.middleCols(na, nb);
  return out;
}

// Y by leaf-to-root elimination over the interface tree.
inline AdmittanceResult build_Y_full(const Scene& scene, CondLog* log = nullptr) {
  const std::size_t n = scene.objects.size();
  std::vector<std::optional<Relation>> node(n);
  for (std::size_t o = 0; o < n; ++o) node[o] = detail::to_relation(scene, object_relation(scene, int(o)));
  auto edges = interface_edges(scene);
  if (edges.size() + 1 != n) throw ValidationError("interface graph is not a tree");

  AdmittanceResult res;
  std::vector<bool> alive(n, true);
  while (!edges.empty()) {
    int leaf = -1;
    std::size_t edge_idx = 0;
    for (std::size_t o = 0; o < n && leaf < 0; ++o) {
      if (!alive[o]) continue;
      int deg = 0;
      std::size_t last = 0;
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].object_a == int(o) || edges[e].object_b == int(o)) {
          ++deg;
          last = e;
        }
      if (deg == 1) {
        leaf = int(o);
        edge_idx = last;
      }
    }
    if (leaf < 0) throw ValidationError("interface graph is not a tree");
    const auto edge = edges[edge_idx];
    const int other = edge.object_a == leaf ? edge.object_b : edge.object_a;
    // The owner side plays the role of the first relation.
    const int first = edge.object_a, second = edge.object_b;
    EliminationStep step;
    Relation merged = detail::eliminate(scene, *node[first], *node[second], edge.piece, step, log);
    step.absorbed_object = leaf;
    step.into_object = other;
    res.steps.push_back(std::move(step));
    node[other] = std::move(merged);
    node[leaf].reset();
    alive[leaf] = false;
    edges.erase(edges.begin() + std::ptrdiff_t(edge_idx));
    // Any edges touching the absorbed object now belong to `other`.
    for (auto& e : edges) {
      if (e.object_a == leaf) e.object_a = other;
      if (e.object_b == leaf) e.object_b = other;
    }
  }
  int root = 0;
  while (!alive[std::size_t(root)]) ++root;
  const Relation& fin = *node[std::size_t(root)];

  const auto outer = scene.outer_pieces();
  const auto off = detail::offsets_of(scene, outer);
  const Matrix XE = detail::remap_cols(fin.XE, fin, outer, off);
  const Matrix XH = detail::remap_cols(fin.XH, fin, outer, off);
  detail::log_cond(log, "Q1", XH);
  res.Y.kind = OperatorKind::Y;
  res.Y.outer_order = outer;
  res.Y.matrix = -LuFactor(XH, "Q1").solve(XE);
  res.final_relation = fin;
  return res;
}

inline SurfaceOperator build_Y(const Scene& scene, CondLog* log = nullptr) {
  return build_Y_full(scene, log).Y;
}

// Shared-piece values recovered from outer E and H by replaying the
// elimination steps backwards. Returns E and H per piece id.
struct PieceFields {
  std::map<int, Vector> E;
  std::map<int, Vector> H;
};

inline PieceFields back_substitute(const Scene& scene, const AdmittanceResult& res, const Vector& E_outer,
                                   const Vector& H_outer) {
  PieceFields f;
  const auto outer = scene.outer_pieces();
  Eigen::Index o = 0;
  for (int p : outer) {
    const auto n = Eigen::Index(scene.pieces[p].size());
    f.E[p] = E_outer.segment(o, n);
    f.H[p] = H_outer.segment(o, n);
    o += n;
  }
  for (auto it = res.steps.rbegin(); it != res.steps.rend(); ++it) {
    const Eigen::Index nx = it->offsets.back();
    Vector x(2 * nx);
    for (std::size_t i = 0; i < it->pieces.size(); ++i) {
      const auto n = it->offsets[i + 1] - it->offsets[i];
      x.segment(it->offsets[i], n) = f.E.at(it->pieces[i]);
      x.segment(nx + it->offsets[i], n) = f.H.at(it->pieces[i]);
    }
    f.E[it->shared_piece] = it->CE * x;
    f.H[it->shared_piece] = it->CH * x;
  }
  return f;
}

// Y of the outer contour enclosing a single homogeneous medium:
// P^-1 (L + U) with normals pointing out of the union.
inline SurfaceOperator build_Y_homogeneous(const Scene& scene, const Medium& medium, CondLog* log = nullptr,
                                           const std::string& name = "P_out") {
  const auto outer = scene.outer_pieces();
  const SegmentList segs = scene.gather(outer);
  const auto kc = KernelConstants::of(medium, scene.omega());
  const auto pu = assemble_PU(segs, segs, 1.0, kc);
  detail::log_cond(log, name, pu.P);
  SurfaceOperator y;
  y.outer_order = outer;
  y.matrix = LuFactor(pu.P, name).solve(assemble_L(segs) + pu.U);
  return y;
}

inline SurfaceOperator build_Yhat(const Scene& scene, CondLog* log = nullptr) {
  auto y = build_Y_homogeneous(scene, scene.background, log, "P0");
  y.kind = OperatorKind::Yhat;
  return y;
}

inline SurfaceOperator build_Ys(const SurfaceOperator& Y, const SurfaceOperator& Yhat) {
  if (Y.matrix.rows() != Yhat.matrix.rows() || Y.matrix.cols() != Yhat.matrix.cols() ||
      Y.outer_order != Yhat.outer_order)
    throw DomainError("build_Ys: Y and Yhat do not conform");
  return {OperatorKind::Ys, Y.matrix - Yhat.matrix, Y.outer_order};
}

// The two-object construction written out block by block. Requires exactly
// two objects and one shared piece; each object's outer pieces are taken
// together in traversal order.
inline SurfaceOperator build_Y_two_object(const Scene& scene) {
  if (scene.objects.size() != 2 || scene.shared_pieces().size() != 1)
    throw DomainError("build_Y_two_object needs two objects and one shared piece");
  const int s = scene.shared_pieces()[0];
  const auto& sp = scene.pieces[s];
  const int o1 = sp.owner, o2 = sp.neighbor;
  auto outer_of = [&](int o) {
    std::vector<int> ids;
    for (const auto& r : scene.objects[o].pieces)
      if (!scene.pieces[r.piece].shared()) ids.push_back(r.piece);
    return ids;
  };
  const std::vector<int> ids1 = outer_of(o1), ids2 = outer_of(o2);
  const SegmentList g1 = scene.gather(ids1), g2 = scene.gather(ids2);
  const SegmentList& g3 = sp.segments;
  const auto k1 = KernelConstants::of(scene.objects[o1].medium, scene.omega());
  const auto k2 = KernelConstants::of(scene.objects[o2].medium, scene.omega());

  // Object 1 sees g3 with stored normals, object 2 with flipped ones.
  const auto b11 = assemble_PU(g1, g1, 1.0, k1), b13 = assemble_PU(g1, g3, 1.0, k1);
  const auto b31 = assemble_PU(g3, g1, 1.0, k1), b33 = assemble_PU(g3, g3, 1.0, k1);
  const auto b22 = assemble_PU(g2, g2, 1.0, k2), b23 = assemble_PU(g2, g3, -1.0, k2);
  const auto b32 = assemble_PU(g3, g2, 1.0, k2), c33 = assemble_PU(g3, g3, -1.0, k2);
  const Matrix L1 = assemble_L(g1), L2 = assemble_L(g2), L3 = assemble_L(g3);

  const LuFactor A1(L3 + b33.U, "A1"), A2(L3 + c33.U, "A2");
  const Matrix A1P33 = A1.solve(b33.P);
  const Matrix B1 = A1P33 + A2.solve(c33.P);
  const LuFactor B1f(B1, "B1");
  const Matrix A1P31 = A1.solve(b31.P), A1U31 = A1.solve(b31.U);
  const Matrix A2P32 = A2.solve(b32.P), A2U32 = A2.solve(b32.U);
  const Matrix C1 = -B1f.solve(A1P31), C2 = B1f.solve(A1U31);
  const Matrix C3 = B1f.solve(A2P32), C4 = -B1f.solve(A2U32);
  const Matrix D1 = A1P31 + A1P33 * C1, D2 = -A1U31 + A1P33 * C2;
  const Matrix D3 = A1P33 * C3, D4 = A1P33 * C4;

  const Matrix M1 = b11.P + b13.P * C1 - b13.U * D1;
  const Matrix M2 = -b11.U + b13.P * C2 - b13.U * D2;
  const Matrix M3 = b13.P * C3 - b13.U * D3;
  const Matrix M4 = b13.P * C4 - b13.U * D4;
  const Matrix F1 = -b23.P * C1 - b23.U * D1;
  const Matrix F2 = -b23.P * C2 - b23.U * D2;
  const Matrix F3 = b22.P - b23.P * C3 - b23.U * D3;
  const Matrix F4 = -b22.U - b23.P * C4 - b23.U * D4;

  const Eigen::Index n1 = L1.rows(), n2 = L2.rows();
  Matrix Q1(n1 + n2, n1 + n2), Q2(n1 + n2, n1 + n2);
  Q1 << M1, M3, F1, F3;
  Q2 << L1 - M2, -M4, -F2, L2 - F4;
  Matrix Y = LuFactor(Q1, "Q1").solve(Q2);

  // Reorder from (object 1 outer, object 2 outer) to scene outer order.
  std::vector<int> local = ids1;
  local.insert(local.end(), ids2.begin(), ids2.end());
  const auto outer = scene.outer_pieces();
  const auto loff = detail::offsets_of(scene, local);
  const auto goff = detail::offsets_of(scene, outer);
  Eigen::VectorXi perm(loff.back());
  for (std::size_t i = 0; i < local.size(); ++i) {
    const auto g = std::size_t(std::find(outer.begin(), outer.end(), local[i]) - outer.begin());
    for (Eigen::Index t = 0; t < loff[i + 1] - loff[i]; ++t) perm(loff[i] + t) = int(goff[g] + t);
  }
  Matrix out(Y.rows(), Y.cols());
  for (Eigen::Index r = 0; r < Y.rows(); ++r)
    for (Eigen::Index c = 0; c < Y.cols(); ++c) out(perm(r), perm(c)) = Y(r, c);
  return {OperatorKind::Y, out, outer};
}

}  // namespace ssie2d

#endif  // SSIE2D_OPERATOR_HPP
