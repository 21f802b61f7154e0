#include "tvpf/mesh.hpp"

#include <cmath>
#include <string>

#include "tvpf/error.hpp"

namespace tvpf {

SpatialMesh build_mesh(double length, int intervals) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ValidationError("mesh length must be positive, got " +
                          std::to_string(length));
  }
  if (intervals < 2) {
    throw ValidationError("mesh needs at least 2 intervals, got " +
                          std::to_string(intervals));
  }
  SpatialMesh mesh;
  mesh.length = length;
  mesh.intervals = intervals;
  mesh.spacing = length / intervals;
  mesh.nodes.resize(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i < intervals; ++i) mesh.nodes[i] = i * mesh.spacing;
  mesh.nodes.back() = length;
  return mesh;
}

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Periodic:
      return "periodic";
    case BoundaryCondition::DirichletZero:
      return "dirichlet";
  }
  return "unknown";
}

LinearOdeSystem assemble_advection(const SpatialMesh& mesh, double velocity) {
  const auto d = static_cast<std::size_t>(mesh.intervals);
  const double c = velocity / (2.0 * mesh.spacing);

  LinearOdeSystem system;
  system.boundary = BoundaryCondition::Periodic;
  system.matrix = BandedMatrix(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (i > 0) system.matrix.lower(i) = c;
    if (i + 1 < d) system.matrix.upper(i) = -c;
  }
  // u_0 aliases u_M, so row 1 sees u_M and row M sees u_1.
  system.matrix.top_right() = c;
  system.matrix.bottom_left() = -c;

  system.loading = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
  system.state_to_node.resize(d);
  for (std::size_t i = 0; i < d; ++i) system.state_to_node[i] = i + 1;
  return system;
}

LinearOdeSystem assemble_heat(const SpatialMesh& mesh, double diffusivity,
                              const ScalarFunction& source_profile) {
  if (!(diffusivity > 0.0)) {
    throw ValidationError("diffusivity must be positive, got " +
                          std::to_string(diffusivity));
  }
  const auto d = static_cast<std::size_t>(mesh.intervals - 1);
  const double c = diffusivity / (mesh.spacing * mesh.spacing);

  LinearOdeSystem system;
  system.boundary = BoundaryCondition::DirichletZero;
  system.matrix = BandedMatrix(d);
  for (std::size_t i = 0; i < d; ++i) {
    system.matrix.diag(i) = -2.0 * c;
    if (i > 0) system.matrix.lower(i) = c;
    if (i + 1 < d) system.matrix.upper(i) = c;
  }

  system.loading.resize(static_cast<Eigen::Index>(d));
  system.state_to_node.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    system.state_to_node[i] = i + 1;
    system.loading[static_cast<Eigen::Index>(i)] = source_profile(mesh.nodes[i + 1]);
  }
  return system;
}

CentralDifferences central_diff_check(const ScalarFunction& f, double x,
                                      double h) {
  const double fp = f(x + h);
  const double f0 = f(x);
  const double fm = f(x - h);
  return {(fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)};
}

std::size_t state_index_at(const SpatialMesh& mesh, const LinearOdeSystem& system,
                           double x) {
  const double position = x / mesh.spacing;
  const double nearest = std::round(position);
  if (!std::isfinite(position) || std::abs(position - nearest) > 1e-9 ||
      nearest < 0.0 || nearest > mesh.intervals) {
    throw ValidationError("location x=" + std::to_string(x) +
                          " does not coincide with a mesh node");
  }
  auto node = static_cast<std::size_t>(nearest);
  if (system.boundary == BoundaryCondition::Periodic && node == 0) {
    node = static_cast<std::size_t>(mesh.intervals);
  }
  for (std::size_t i = 0; i < system.state_to_node.size(); ++i) {
    if (system.state_to_node[i] == node) return i;
  }
  throw ValidationError("location x=" + std::to_string(x) +
                        " is a boundary node that is not part of the state");
}

}  // namespace tvpf
