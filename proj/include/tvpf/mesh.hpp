#pragma once

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tvpf/banded.hpp"

namespace tvpf {

using ScalarFunction = std::function<double(double)>;

// Equispaced grid x_i = i * h on [0, L], i = 0..M.
struct SpatialMesh {
  double length = 0.0;
  int intervals = 0;  // M
  double spacing = 0.0;
  std::vector<double> nodes;

  std::size_t node_count() const noexcept { return nodes.size(); }
};

// Throws ValidationError unless length > 0 and intervals >= 2.
SpatialMesh build_mesh(double length, int intervals);

enum class BoundaryCondition {
  Periodic,       // u(0,t) = u(L,t); states are nodes 1..M
  DirichletZero,  // u(0,t) = u(L,t) = 0; states are nodes 1..M-1
};

std::string_view to_string(BoundaryCondition bc);

// Semi-discrete system du/dt = A u + theta(t) b.
struct LinearOdeSystem {
  BandedMatrix matrix;
  Eigen::VectorXd loading;
  std::vector<std::size_t> state_to_node;
  BoundaryCondition boundary = BoundaryCondition::DirichletZero;

  std::size_t dim() const noexcept { return matrix.dim(); }
};

// Central first-difference circulant with periodic wrap, loading vector of ones.
LinearOdeSystem assemble_advection(const SpatialMesh& mesh, double velocity);

// Central second-difference stencil with homogeneous Dirichlet ends; loading
// vector samples source_profile at the interior nodes.
LinearOdeSystem assemble_heat(const SpatialMesh& mesh, double diffusivity,
                              const ScalarFunction& source_profile);

struct CentralDifferences {
  double first;
  double second;
};

// Pointwise central-difference stencils, used to validate assembled matrices.
CentralDifferences central_diff_check(const ScalarFunction& f, double x,
                                      double h);

// State index of the mesh node at x. On a periodic mesh node 0 aliases node M.
// Throws ValidationError when x is not within 1e-9 * h of a node, or when the
// node is a Dirichlet end that the state does not carry.
std::size_t state_index_at(const SpatialMesh& mesh, const LinearOdeSystem& system,
                           double x);

}  // namespace tvpf
