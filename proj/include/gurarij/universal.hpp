#pragma once

#include <map>
#include <string>
#include <vector>

#include "gurarij/aells.hpp"
#include "gurarij/space.hpp"
#include "gurarij/tower.hpp"

namespace gurarij::universal {

using space::SpacePtr;

/// A finite group by its multiplication table: table[a][b] is the index of
/// the product ab.
struct FiniteGroupPresentation {
  std::vector<std::string> elements;
  std::vector<std::vector<std::size_t>> table;
  std::size_t identity = 0;
  std::map<std::string, double> generators;  ///< label -> positive weight

  std::size_t size() const { return elements.size(); }
  std::size_t index(const std::string& label) const;  ///< throws invalid_group
  std::size_t inverse(std::size_t a) const;
};

/// Throws invalid_group unless the table is a group (associativity checked
/// exhaustively up to 24 elements, on a fixed sample beyond).
void validate(const FiniteGroupPresentation& g);

/// Z_n with generator "g1" of the given weight; elements "e", "g1", ..., "g{n-1}".
FiniteGroupPresentation cyclic_group(std::size_t n, double weight = 1.0);
/// S_3 as permutations of {0,1,2}, generated by a transposition and a 3-cycle.
FiniteGroupPresentation symmetric_group_3(double weight = 1.0);

/// Word metric of the weighted generators (right multiplication, so the
/// metric is left-invariant), capped at 1, plus a base point "*" at
/// distance 1 from every element. Throws disconnected_generating_set.
aells::PointedFiniteMetric left_invariant_metric(const FiniteGroupPresentation& g);

struct LinearIsometryWitness {
  Matrix matrix;
  SpacePtr space;
};

/// max over `samples` random vectors of | ||Mx|| - ||x|| | / ||x||.
double isometry_defect(const LinearIsometryWitness& w, std::size_t samples = 200, std::uint64_t seed = 0x1503);

struct TelemanEmbedding {
  aells::PointedFiniteMetric metric;  ///< H plus "*", base "*"
  SpacePtr space;                     ///< AE(H*, *) on coordinates indexed by H
  std::vector<LinearIsometryWitness> rho;  ///< rho[h] permutes coordinates g -> hg
};

TelemanEmbedding teleman_embed(const FiniteGroupPresentation& g);

/// The AE norm of coordinates a (indexed by H) as the molecule
/// sum a_h delta_h - (sum a_h) delta_*.
double teleman_norm(const TelemanEmbedding& t, std::span<const double> a);

struct TelemanReport {
  bool homomorphism = true;   ///< rho(ab) = rho(a) rho(b) exactly, all pairs
  bool injective = true;
  double isometry_defect = 0.0;  ///< max over rho(h) on random molecules
  double orbit_defect = 0.0;     ///< max | ||delta_g - delta_h|| - d(g,h) |
  std::vector<std::string> failures;
  bool pass(double tol = 1e-9) const {
    return homomorphism && injective && isometry_defect <= tol && orbit_defect <= tol;
  }
};

TelemanReport check_teleman(const FiniteGroupPresentation& g, const TelemanEmbedding& t, std::size_t samples = 200);

/// Theta(phi) on E_{n+1} for a witness on E_n of the build. Throws
/// invalid_input when phi is not an isometry (10^-9 on samples) or E_n is
/// the top of the chain, and orbit_escape as in tower::induced_matrix.
LinearIsometryWitness induced_isometry(const tower::BuildState& state, const LinearIsometryWitness& phi);

struct GEmbeddingReport {
  bool extension = true;     ///< Theta(phi) restricted to E_n equals phi
  bool homomorphism = true;  ///< Theta(phi psi) = Theta(phi) Theta(psi)
  bool injective = true;
  bool modulus = true;       ///< ||(Theta phi - Theta psi) x|| <= displacement on unit generators
  double isometry_defect = 0.0;
  std::vector<std::string> failures;
  bool pass(double tol = 1e-8) const {
    return extension && homomorphism && injective && modulus && isometry_defect <= tol && failures.empty();
  }
};

GEmbeddingReport verify_g_embedding(const tower::BuildState& state, const std::vector<LinearIsometryWitness>& action);

}  // namespace gurarij::universal
