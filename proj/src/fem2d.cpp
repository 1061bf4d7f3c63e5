#include "perzyna/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/SparseCholesky>

namespace perzyna {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (x - (a + s * ab)).norm();
}

}  // namespace

Vec2 Mesh::barycenter(int tri) const {
  const auto& t = triangles[tri];
  return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

double Mesh::distance_to_boundary(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : boundary_edges) best = std::min(best, segment_distance(x, nodes[e[0]], nodes[e[1]]));
  return best;
}

Mesh make_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> triangles, std::vector<char> boundary_flags) {
  const int nn = static_cast<int>(nodes.size());
  if (nn == 0) throw MeshInvalid("mesh has no nodes");
  if (triangles.empty()) throw MeshInvalid("mesh has no triangles");
  if (static_cast<int>(boundary_flags.size()) != nn) throw MeshInvalid("boundary flag count differs from node count");

  Mesh m;
  m.nodes = std::move(nodes);
  m.triangles = std::move(triangles);
  m.areas.resize(m.triangles.size());
  m.grads.resize(m.triangles.size());

  std::vector<char> used(nn, 0);
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nn)
        throw MeshInvalid("triangle " + std::to_string(t) + " references node " + std::to_string(tri[k]) +
                          " out of range");
      used[tri[k]] = 1;
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw MeshInvalid("triangle " + std::to_string(t) + " has repeated nodes");
    const Vec2& a = m.nodes[tri[0]];
    const Vec2& b = m.nodes[tri[1]];
    const Vec2& c = m.nodes[tri[2]];
    const double area = signed_area(a, b, c);
    if (area < 0.0) throw MeshInvalid("negative area: triangle " + std::to_string(t) + " is clockwise");
    if (!(area > 0.0)) throw MeshInvalid("zero area: triangle " + std::to_string(t) + " is degenerate");
    m.areas[t] = area;
    const Vec2* x[3] = {&a, &b, &c};
    for (int k = 0; k < 3; ++k) {
      const Vec2& p1 = *x[(k + 1) % 3];
      const Vec2& p2 = *x[(k + 2) % 3];
      m.grads[t][k] = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / (2.0 * area);
    }
    for (int k = 0; k < 3; ++k) {
      const std::pair<int, int> edge{tri[k], tri[(k + 1) % 3]};
      if (++directed[edge] > 1)
        throw MeshInvalid("nonconforming: edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second) +
                          " used twice with the same orientation");
    }
  }
  for (int i = 0; i < nn; ++i)
    if (!used[i]) throw MeshInvalid("node " + std::to_string(i) + " is not referenced by any triangle");

  std::vector<char> on_boundary(nn, 0);
  for (const auto& [edge, count] : directed) {
    (void)count;
    if (directed.count({edge.second, edge.first}) == 0) {
      m.boundary_edges.push_back({edge.first, edge.second});
      on_boundary[edge.first] = on_boundary[edge.second] = 1;
    }
  }
  for (int i = 0; i < nn; ++i) {
    if (boundary_flags[i] != 0 && boundary_flags[i] != 1)
      throw MeshInvalid("node " + std::to_string(i) + " has boundary flag other than 0/1");
    if (boundary_flags[i] != on_boundary[i])
      throw MeshInvalid("boundary flag mismatch at node " + std::to_string(i) + " (flag " +
                        std::to_string(static_cast<int>(boundary_flags[i])) + ", topology says " +
                        std::to_string(static_cast<int>(on_boundary[i])) + ")");
    if (on_boundary[i]) m.boundary_nodes.push_back(i);
  }
  m.on_boundary = std::move(on_boundary);
  return m;
}

Mesh build_rect_mesh(const RectSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) throw MeshInvalid("rect mesh needs nx, ny >= 1");
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0)) throw MeshInvalid("rect mesh needs positive side lengths");
  const int nx = spec.nx;
  const int ny = spec.ny;
  std::vector<Vec2> nodes;
  std::vector<char> flags;
  nodes.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      nodes.emplace_back(spec.lx * i / nx, spec.ly * j / ny);
      flags.push_back(i == 0 || j == 0 || i == nx || j == ny ? 1 : 0);
    }
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = j * (nx + 1) + i;
      const int n10 = n00 + 1;
      const int n01 = n00 + nx + 1;
      const int n11 = n01 + 1;
      tris.push_back({n00, n10, n11});
      tris.push_back({n00, n11, n01});
    }
  }
  return make_mesh(std::move(nodes), std::move(tris), std::move(flags));
}

Mesh parse_mesh(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  std::size_t cur = 0;
  auto header = [&](const char* key) {
    if (cur >= lines.size()) throw MeshInvalid(std::string("mesh file: missing '") + key + "' header");
    std::istringstream ss(lines[cur++]);
    std::string word;
    long count = -1;
    if (!(ss >> word >> count) || word != key || count < 0)
      throw MeshInvalid(std::string("mesh file: expected '") + key + " <count>', got '" + lines[cur - 1] + "'");
    return count;
  };

  const long nn = header("nodes");
  std::vector<Vec2> nodes;
  std::vector<char> flags;
  for (long i = 0; i < nn; ++i) {
    if (cur >= lines.size()) throw MeshInvalid("mesh file: truncated node list");
    std::istringstream ss(lines[cur++]);
    double x = 0, y = 0;
    int flag = -1;
    std::string extra;
    if (!(ss >> x >> y >> flag) || (ss >> extra)) throw MeshInvalid("mesh file: bad node line '" + lines[cur - 1] + "'");
    nodes.emplace_back(x, y);
    flags.push_back(static_cast<char>(flag));
  }
  const long nt = header("tris");
  std::vector<std::array<int, 3>> tris;
  for (long i = 0; i < nt; ++i) {
    if (cur >= lines.size()) throw MeshInvalid("mesh file: truncated triangle list");
    std::istringstream ss(lines[cur++]);
    std::array<int, 3> t{};
    std::string extra;
    if (!(ss >> t[0] >> t[1] >> t[2]) || (ss >> extra))
      throw MeshInvalid("mesh file: bad triangle line '" + lines[cur - 1] + "'");
    tris.push_back(t);
  }
  if (cur != lines.size()) throw MeshInvalid("mesh file: trailing content '" + lines[cur] + "'");
  return make_mesh(std::move(nodes), std::move(tris), std::move(flags));
}

Mesh read_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshInvalid("cannot open mesh file " + path.string());
  return parse_mesh(in);
}

// Kinematics --------------------------------------------------------------------

SymTensor2 element_strain(const Mesh& mesh, int tri, std::span<const Vec2> u) {
  const auto& t = mesh.triangles[tri];
  const auto& g = mesh.grads[tri];
  double dudx = 0, dudy = 0, dvdx = 0, dvdy = 0;
  for (int k = 0; k < 3; ++k) {
    const Vec2& uk = u[t[k]];
    dudx += uk.x() * g[k].x();
    dudy += uk.x() * g[k].y();
    dvdx += uk.y() * g[k].x();
    dvdy += uk.y() * g[k].y();
  }
  return {dudx, dvdy, 0.5 * (dudy + dvdx)};
}

ElementTensors element_strains(const Mesh& mesh, std::span<const Vec2> u) {
  ElementTensors out(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) out[t] = element_strain(mesh, t, u);
  return out;
}

Eigen::Matrix<double, 3, 6> strain_matrix(const Mesh& mesh, int tri) {
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  const auto& g = mesh.grads[tri];
  for (int k = 0; k < 3; ++k) {
    b(0, 2 * k) = g[k].x();
    b(1, 2 * k + 1) = g[k].y();
    b(2, 2 * k) = 0.5 * g[k].y();
    b(2, 2 * k + 1) = 0.5 * g[k].x();
  }
  return b;
}

// Assembly --------------------------------------------------------------------------

DofMap DofMap::all_boundary_fixed(const Mesh& mesh) {
  DofMap d;
  d.free_index.assign(2 * mesh.num_nodes(), -1);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.on_boundary[i]) continue;
    d.free_index[2 * i] = d.num_free++;
    d.free_index[2 * i + 1] = d.num_free++;
  }
  return d;
}

ElementContribution element_contribution(const Mesh& mesh, int tri, const SymTensor2& sigma, const TensorMap& tangent) {
  const Eigen::Matrix<double, 3, 6> b = strain_matrix(mesh, tri);
  const Eigen::Matrix<double, 6, 3> bw = b.transpose() * frobenius_metric();
  const double area = mesh.areas[tri];
  return {area * bw * sigma.vec(), area * bw * tangent * b};
}

NodalVectors load_vector(const Mesh& mesh, std::span<const Vec2> f_bary) {
  NodalVectors out(mesh.num_nodes(), Vec2::Zero());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Vec2 share = mesh.areas[t] / 3.0 * f_bary[t];
    for (int k = 0; k < 3; ++k) out[mesh.triangles[t][k]] += share;
  }
  return out;
}

AssembledSystem assemble(const Mesh& mesh, const DofMap& dofs, std::span<const ElementContribution> contributions,
                         std::span<const Vec2> load) {
  AssembledSystem sys;
  sys.residual.assign(mesh.num_nodes(), Vec2::Zero());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(36 * contributions.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& c = contributions[t];
    int gdof[6];
    for (int k = 0; k < 3; ++k) {
      sys.residual[tri[k]] += Vec2(c.residual(2 * k), c.residual(2 * k + 1));
      gdof[2 * k] = dofs.free_index[2 * tri[k]];
      gdof[2 * k + 1] = dofs.free_index[2 * tri[k] + 1];
    }
    for (int a = 0; a < 6; ++a) {
      if (gdof[a] < 0) continue;
      for (int b = 0; b < 6; ++b)
        if (gdof[b] >= 0) trip.emplace_back(gdof[a], gdof[b], c.stiffness(a, b));
    }
  }
  for (int i = 0; i < mesh.num_nodes(); ++i) sys.residual[i] -= load[i];

  sys.residual_free = Eigen::VectorXd::Zero(dofs.num_free);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    for (int c = 0; c < 2; ++c) {
      const int f = dofs.free_index[2 * i + c];
      if (f >= 0) sys.residual_free[f] = sys.residual[i][c];
    }
  }
  sys.residual_sup = dofs.num_free > 0 ? sys.residual_free.cwiseAbs().maxCoeff() : 0.0;
  sys.tangent.resize(dofs.num_free, dofs.num_free);
  sys.tangent.setFromTriplets(trip.begin(), trip.end());
  // Element stiffnesses are symmetric in exact arithmetic; remove rounding asymmetry.
  Eigen::SparseMatrix<double> kt = sys.tangent.transpose();
  sys.tangent = 0.5 * (sys.tangent + kt);
  return sys;
}

AssembledSystem assemble(const Mesh& mesh, const DofMap& dofs, std::span<const SymTensor2> stress,
                         std::span<const TensorMap> tangents, std::span<const Vec2> f_bary) {
  std::vector<ElementContribution> contrib(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) contrib[t] = element_contribution(mesh, t, stress[t], tangents[t]);
  const NodalVectors load = load_vector(mesh, f_bary);
  return assemble(mesh, dofs, contrib, load);
}

Eigen::VectorXd solve_symmetric(const Eigen::SparseMatrix<double>& k, const Eigen::VectorXd& rhs) {
  if (k.rows() == 0) return Eigen::VectorXd::Zero(0);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
  if (ldlt.info() != Eigen::Success) throw SingularTangent("sparse LDLT factorization failed");
  if ((ldlt.vectorD().array() <= 0.0).any()) throw SingularTangent("global tangent is not positive definite");
  Eigen::VectorXd x = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || !x.allFinite()) throw SingularTangent("sparse LDLT solve failed");
  return x;
}

// Post-processing -------------------------------------------------------------------

NodalTensors recover_nodal_stress(const Mesh& mesh, std::span<const SymTensor2> element_values) {
  NodalTensors acc(mesh.num_nodes());
  std::vector<double> weight(mesh.num_nodes(), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int n = mesh.triangles[t][k];
      acc[n] += mesh.areas[t] * element_values[t];
      weight[n] += mesh.areas[t];
    }
  }
  for (int i = 0; i < mesh.num_nodes(); ++i) acc[i] = acc[i] / weight[i];
  return acc;
}

std::array<SymTensor2, 2> nodal_gradient(const Mesh& mesh, int tri, std::span<const SymTensor2> nodal) {
  std::array<SymTensor2, 2> g{};
  for (int k = 0; k < 3; ++k) {
    const SymTensor2& v = nodal[mesh.triangles[tri][k]];
    g[0] += mesh.grads[tri][k].x() * v;
    g[1] += mesh.grads[tri][k].y() * v;
  }
  return g;
}

double h1_seminorm_interior(const Mesh& mesh, std::span<const SymTensor2> nodal, double margin) {
  double sum = 0.0;
  int count = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.distance_to_boundary(mesh.barycenter(t)) < margin) continue;
    const auto g = nodal_gradient(mesh, t, nodal);
    sum += mesh.areas[t] * (norm2(g[0]) + norm2(g[1]));
    ++count;
  }
  if (count == 0) throw EmptyInterior("no triangle lies at distance >= " + std::to_string(margin) + " from the boundary");
  return std::sqrt(sum);
}

double l2_norm(const Mesh& mesh, std::span<const SymTensor2> values) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) sum += mesh.areas[t] * norm2(values[t]);
  return std::sqrt(sum);
}

}  // namespace perzyna
