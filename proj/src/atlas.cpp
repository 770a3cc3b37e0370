#include "solitonkit/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solitonkit/errors.hpp"

namespace solitonkit::grid {

namespace {

constexpr int kGhostDegree = 5;
constexpr int kGhostTerms = (kGhostDegree + 1) * (kGhostDegree + 2) / 2;
constexpr int kGhostSources = 36;
constexpr int kGhostSearch = 4;

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

// chi(w) = 1 - H((log|w| + a) / 2a), so chi(w) + chi(w / |w|^2) = 1.
double sphere_blend(const Vec2& w) {
  const double r = std::hypot(w[0], w[1]);
  if (r == 0.0) return 1.0;
  const double a = std::log(kSphereBlendRadius);
  return 1.0 - smooth_step((std::log(r) + a) / (2.0 * a));
}

// d w'^b / d w^a of the inversion at w, stored as m[b][a].
Mat2 inversion_jacobian(const Vec2& w) {
  const double r2 = w[0] * w[0] + w[1] * w[1];
  const double r4 = r2 * r2;
  Mat2 m{};
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) m[b][a] = ((a == b ? r2 : 0.0) - 2.0 * w[a] * w[b]) / r4;
  return m;
}

std::array<double, kGhostTerms> monomials(double x, double y) {
  std::array<double, kGhostTerms> m{};
  int q = 0;
  for (int d = 0; d <= kGhostDegree; ++d)
    for (int j = 0; j <= d; ++j) m[q++] = std::pow(x, d - j) * std::pow(y, j);
  return m;
}

}  // namespace

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::scalar: return "scalar";
    case FieldKind::vector: return "vector";
    case FieldKind::covector: return "covector";
    case FieldKind::sym2: return "sym2";
  }
  return "unknown";
}

std::shared_ptr<const ChartAtlas> ChartAtlas::torus(int resolution, double period_x, double period_y) {
  if (resolution < 8) throw PreconditionError("torus atlas: resolution must be >= 8");
  if (!(period_x > 0.0) || !(period_y > 0.0)) throw PreconditionError("torus atlas: periods must be positive");
  std::shared_ptr<ChartAtlas> a(new ChartAtlas());
  a->kind_ = AtlasKind::torus;
  a->resolution_ = resolution;
  a->spacing_ = {period_x / resolution, period_y / resolution};
  a->charts_.push_back(Chart{{0.0, 0.0}, {period_x, period_y}, resolution, true});
  a->finalize_ownership();
  a->build_sync();
  return a;
}

std::shared_ptr<const ChartAtlas> ChartAtlas::sphere(int resolution) {
  if (resolution < 16) throw PreconditionError("sphere atlas: resolution must be >= 16");
  std::shared_ptr<ChartAtlas> a(new ChartAtlas());
  a->kind_ = AtlasKind::sphere;
  a->resolution_ = resolution;
  const double L = kSphereBoxHalfWidth;
  const double h = 2.0 * L / (resolution - 1);
  a->spacing_ = {h, h};
  for (int c = 0; c < 2; ++c) a->charts_.push_back(Chart{{-L, -L}, {L, L}, resolution, false});
  a->finalize_ownership();
  a->build_sync();
  return a;
}

Vec2 ChartAtlas::coordinate(int node) const {
  const Chart& ch = charts_[chart_of(node)];
  return {ch.lo[0] + index_i(node) * spacing_[0], ch.lo[1] + index_j(node) * spacing_[1]};
}

int ChartAtlas::shift(int node, int di, int dj) const {
  const int c = chart_of(node);
  int i = index_i(node) + di;
  int j = index_j(node) + dj;
  const int n = resolution_;
  if (charts_[c].periodic) {
    i = ((i % n) + n) % n;
    j = ((j % n) + n) % n;
  } else if (i < 0 || j < 0 || i >= n || j >= n) {
    return -1;
  }
  return this->node(c, i, j);
}

void ChartAtlas::finalize_ownership() {
  dof_of_node_.assign(node_count(), -1);
  blend_.assign(node_count(), 1.0);
  edge_band_.assign(node_count(), 0);
  owned_nodes_.clear();
  native_nodes_.clear();
  for (int nd = 0; nd < node_count(); ++nd) {
    bool own = true;
    if (kind_ == AtlasKind::sphere) {
      const int i = index_i(nd), j = index_j(nd), n = resolution_;
      edge_band_[nd] = (i < kEdgeBand || j < kEdgeBand || i >= n - kEdgeBand || j >= n - kEdgeBand) ? 1 : 0;
      const Vec2 w = coordinate(nd);
      const double r2 = w[0] * w[0] + w[1] * w[1];
      own = chart_of(nd) == 0 ? r2 <= 1.0 + 1e-12 : r2 < 1.0 - 1e-12;
      blend_[nd] = sphere_blend(w);
    }
    if (own && edge_band_[nd]) throw IntegrityError("sphere atlas: owned node in the edge band");
    if (own) {
      dof_of_node_[nd] = static_cast<int>(owned_nodes_.size());
      owned_nodes_.push_back(nd);
    }
    if (!edge_band_[nd]) native_nodes_.push_back(nd);
  }
}

void ChartAtlas::build_sync() {
  ghosts_.clear();
  if (kind_ == AtlasKind::sphere) {
    const double h = spacing_[0];
    const Mat2 identity{{{1.0, 0.0}, {0.0, 1.0}}};
    for (int nd = 0; nd < node_count(); ++nd) {
      if (owned(nd)) continue;
      const Vec2 w = coordinate(nd);
      const double r2 = w[0] * w[0] + w[1] * w[1];
      const Vec2 wp{w[0] / r2, w[1] / r2};
      const int here = chart_of(nd);
      const int other = 1 - here;
      // Owned nodes of both charts around the ghost, positioned in this chart's coordinates.
      struct Cand {
        double dist;
        int node;
        Vec2 pos;
      };
      std::vector<Cand> cand;
      auto collect = [&](int chart, const Vec2& centre) {
        const Chart& ch = charts_[chart];
        const int ci = static_cast<int>(std::lround((centre[0] - ch.lo[0]) / h));
        const int cj = static_cast<int>(std::lround((centre[1] - ch.lo[1]) / h));
        for (int i = ci - kGhostSearch; i <= ci + kGhostSearch; ++i)
          for (int j = cj - kGhostSearch; j <= cj + kGhostSearch; ++j) {
            if (i < 0 || j < 0 || i >= resolution_ || j >= resolution_) continue;
            const int src = node(chart, i, j);
            if (!owned(src)) continue;
            Vec2 s = coordinate(src);
            if (chart != here) {
              const double q = s[0] * s[0] + s[1] * s[1];
              s = {s[0] / q, s[1] / q};
            }
            cand.push_back({std::hypot(s[0] - w[0], s[1] - w[1]), src, s});
          }
      };
      collect(here, w);
      collect(other, wp);
      if (static_cast<int>(cand.size()) < kGhostSources)
        throw PreconditionError("sphere atlas: resolution too coarse for ghost interpolation");
      std::partial_sort(cand.begin(), cand.begin() + kGhostSources, cand.end(),
                        [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
      Eigen::MatrixXd V(kGhostSources, kGhostTerms);
      GhostStencil gs;
      gs.node = nd;
      for (int k = 0; k < kGhostSources; ++k) {
        const auto m = monomials((cand[k].pos[0] - w[0]) / h, (cand[k].pos[1] - w[1]) / h);
        for (int q = 0; q < kGhostTerms; ++q) V(k, q) = m[q];
        gs.sources.push_back(cand[k].node);
        if (chart_of(cand[k].node) == here) {
          gs.jac.push_back(identity);
          gs.jac_inv.push_back(identity);
        } else {
          gs.jac.push_back(inversion_jacobian(cand[k].pos));
          gs.jac_inv.push_back(inversion_jacobian(coordinate(cand[k].node)));
        }
      }
      // Least-squares polynomial fit evaluated at the target (offset 0): weights = V (V^T V)^{-1} e_0.
      Eigen::VectorXd e0 = Eigen::VectorXd::Zero(kGhostTerms);
      e0(0) = 1.0;
      // Equivalently the minimum-norm solution of V^T w = e_0.
      Eigen::MatrixXd Vt = V.transpose();
      Eigen::VectorXd wts = Vt.completeOrthogonalDecomposition().solve(e0);
      gs.weights.assign(wts.data(), wts.data() + wts.size());
      ghosts_.push_back(std::move(gs));
    }
  }

  const FieldKind kinds[4] = {FieldKind::scalar, FieldKind::vector, FieldKind::covector, FieldKind::sym2};
  for (int kidx = 0; kidx < 4; ++kidx) {
    const FieldKind kind = kinds[kidx];
    const int nc = component_count(kind);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(owned_count()) * nc + ghosts_.size() * kGhostSources * nc * nc);
    for (int nd : owned_nodes_)
      for (int c = 0; c < nc; ++c) trip.emplace_back(nd * nc + c, dof_of_node_[nd] * nc + c, 1.0);
    for (const auto& gs : ghosts_) {
      for (std::size_t k = 0; k < gs.sources.size(); ++k) {
        // T[out][in]: components at the source, expressed in the ghost's chart frame.
        double T[3][3] = {};
        const auto& J = gs.jac[k];
        const auto& K = gs.jac_inv[k];
        switch (kind) {
          case FieldKind::scalar: T[0][0] = 1.0; break;
          case FieldKind::covector:
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) T[a][b] = J[b][a];
            break;
          case FieldKind::vector:
            for (int a = 0; a < 2; ++a)
              for (int b = 0; b < 2; ++b) T[a][b] = K[a][b];
            break;
          case FieldKind::sym2: {
            const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
            for (int o = 0; o < 3; ++o) {
              const int a = pairs[o][0], b = pairs[o][1];
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) T[o][sym_index(c, d)] += J[c][a] * J[d][b];
            }
            break;
          }
        }
        const int src_dof = dof_of_node_[gs.sources[k]];
        for (int o = 0; o < nc; ++o)
          for (int i = 0; i < nc; ++i)
            if (T[o][i] != 0.0) trip.emplace_back(gs.node * nc + o, src_dof * nc + i, gs.weights[k] * T[o][i]);
      }
    }
    SparseMatrix S(node_count() * nc, owned_count() * nc);
    S.setFromTriplets(trip.begin(), trip.end());
    S.makeCompressed();

    std::vector<Eigen::Triplet<double>> rt;
    for (int k = 0; k < owned_count(); ++k)
      for (int c = 0; c < nc; ++c) rt.emplace_back(k * nc + c, owned_nodes_[k] * nc + c, 1.0);
    SparseMatrix R(owned_count() * nc, node_count() * nc);
    R.setFromTriplets(rt.begin(), rt.end());

    // Native rows keep their value; edge-band rows are re-interpolated from the owned entries.
    SparseMatrix SR = S * R;
    std::vector<Eigen::Triplet<double>> qt;
    for (int nd = 0; nd < node_count(); ++nd)
      for (int c = 0; c < nc; ++c) {
        const int row = nd * nc + c;
        if (!edge_band_[nd]) {
          qt.emplace_back(row, row, 1.0);
          continue;
        }
        for (SparseMatrix::InnerIterator it(SR, row); it; ++it) qt.emplace_back(row, it.col(), it.value());
      }
    SparseMatrix Q(node_count() * nc, node_count() * nc);
    Q.setFromTriplets(qt.begin(), qt.end());

    sync_[kidx] = std::move(S);
    restrict_[kidx] = std::move(R);
    band_resync_[kidx] = std::move(Q);
  }
}

const SparseMatrix& ChartAtlas::sync_matrix(FieldKind kind) const { return sync_[static_cast<int>(kind)]; }
const SparseMatrix& ChartAtlas::band_resync_matrix(FieldKind kind) const {
  return band_resync_[static_cast<int>(kind)];
}
const SparseMatrix& ChartAtlas::restriction_matrix(FieldKind kind) const { return restrict_[static_cast<int>(kind)]; }

Eigen::VectorXd ChartAtlas::extend(const Eigen::VectorXd& dofs, FieldKind kind) const {
  return sync_matrix(kind) * dofs;
}

Eigen::VectorXd ChartAtlas::resync_edge_band(const Eigen::VectorXd& full, FieldKind kind) const {
  if (native_nodes_.size() == static_cast<std::size_t>(node_count())) return full;
  const int nc = component_count(kind);
  const Eigen::VectorXd synced = extend(restrict_to_dofs(full, kind), kind);
  Eigen::VectorXd out = full;
  for (int nd = 0; nd < node_count(); ++nd)
    if (edge_band_[nd])
      for (int c = 0; c < nc; ++c) out(nd * nc + c) = synced(nd * nc + c);
  return out;
}

Eigen::VectorXd ChartAtlas::restrict_to_dofs(const Eigen::VectorXd& full, FieldKind kind) const {
  const int nc = component_count(kind);
  Eigen::VectorXd out(owned_count() * nc);
  for (int k = 0; k < owned_count(); ++k)
    for (int c = 0; c < nc; ++c) out(k * nc + c) = full(owned_nodes_[k] * nc + c);
  return out;
}

std::array<double, 3> ChartAtlas::embedding(int node) const {
  if (kind_ != AtlasKind::sphere) throw PreconditionError("embedding: only defined on the sphere atlas");
  const Vec2 w = coordinate(node);
  const double r2 = w[0] * w[0] + w[1] * w[1];
  const double D = 1.0 + r2;
  const double z = chart_of(node) == 0 ? (r2 - 1.0) / D : (1.0 - r2) / D;
  return {2.0 * w[0] / D, 2.0 * w[1] / D, z};
}

std::array<Vec2, 3> ChartAtlas::embedding_jacobian(int node) const {
  if (kind_ != AtlasKind::sphere) throw PreconditionError("embedding: only defined on the sphere atlas");
  const Vec2 w = coordinate(node);
  const double r2 = w[0] * w[0] + w[1] * w[1];
  const double D = 1.0 + r2;
  const double D2 = D * D;
  const double sgn = chart_of(node) == 0 ? 1.0 : -1.0;
  std::array<Vec2, 3> J{};
  J[0] = {2.0 / D - 4.0 * w[0] * w[0] / D2, -4.0 * w[0] * w[1] / D2};
  J[1] = {-4.0 * w[0] * w[1] / D2, 2.0 / D - 4.0 * w[1] * w[1] / D2};
  J[2] = {sgn * 4.0 * w[0] / D2, sgn * 4.0 * w[1] / D2};
  return J;
}

std::string ChartAtlas::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  os << (kind_ == AtlasKind::torus ? "torus" : "sphere") << ";res=" << resolution_;
  for (const auto& ch : charts_)
    os << ";chart=" << ch.lo[0] << ',' << ch.lo[1] << ',' << ch.hi[0] << ',' << ch.hi[1] << ','
       << (ch.periodic ? 'p' : 'b');
  return os.str();
}

}  // namespace solitonkit::grid
