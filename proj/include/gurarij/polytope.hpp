#pragma once

#include <cstddef>
#include <vector>

#include "gurarij/linalg.hpp"
#include "gurarij/space.hpp"

// Small-dimensional polyhedral kernels. The vertex enumerator and the batch
// norm evaluator come in an OpenMP version and a serial reference; both
// produce identical output.
namespace gurarij::polytope {

/// a . x <= b
struct HalfSpace {
  Vector a;
  double b = 0.0;
};

struct EnumerationOptions {
  double tol = 1e-9;
  /// Hard cap on the number of d-subsets examined; exceeding it throws
  /// Error(invalid_input) instead of running for hours.
  std::size_t max_subsets = 50'000'000;
};

/// Vertices of {x in R^dim : a.x <= b for all rows}, by brute force over
/// dim-subsets of rows. Works for unbounded polyhedra (returns the vertices
/// only). Output is deduplicated and sorted lexicographically.
std::vector<Vector> vertices(const std::vector<HalfSpace>& h, std::size_t dim,
                             const EnumerationOptions& opt = {});
std::vector<Vector> vertices_serial(const std::vector<HalfSpace>& h, std::size_t dim,
                                    const EnumerationOptions& opt = {});

/// max_g <g, x> for each point.
Vector batch_norms(const std::vector<Vector>& generators, const std::vector<Vector>& points);
Vector batch_norms_serial(const std::vector<Vector>& generators, const std::vector<Vector>& points);

/// Drops rows implied by the others (LP test), plus exact duplicates after
/// scaling to unit normal.
std::vector<HalfSpace> prune_redundant(const std::vector<HalfSpace>& h, std::size_t dim,
                                       double tol = 1e-9);

/// Projects onto the first `keep` coordinates by Fourier-Motzkin elimination
/// of the trailing ones, pruning after each step.
std::vector<HalfSpace> project(std::vector<HalfSpace> h, std::size_t dim, std::size_t keep);

/// Halfspace form of the projection of a lifted dual ball onto its c
/// coordinates. Equality rows are used to substitute aux variables before
/// any Fourier-Motzkin step.
std::vector<HalfSpace> ball_halfspaces(const space::DualBall& ball);

/// Vertices of the dual ball, i.e. a generator list for the same norm.
/// Only for ball.dim <= 4.
std::vector<Vector> dual_ball_vertices(const space::DualBall& ball);

}  // namespace gurarij::polytope
