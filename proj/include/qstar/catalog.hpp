#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qstar/bounds.hpp"

namespace qstar {

/// A named value the entry is known to reproduce.
struct Checkpoint {
  std::string name;
  double expected = 0.0;
  double tol = 0.0;
  std::string note;
};

struct CheckpointResult {
  std::string name;
  double expected = 0.0;
  double observed = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Everything needed to run verify-bound on an entry.
struct BoundSetup {
  FourierField special;  // E field for S forms, J field for T forms
  std::optional<OperatorSymbol> flux_potential;
};

struct CatalogEntry {
  std::string name;
  std::string summary;
  OperatorSymbol sym;
  std::optional<OperatorSymbol> second;  // J-side operator of a mixed entry
  QuadraticForm form;
  std::map<std::string, OperatorSymbol> flux_potentials;
  std::optional<Vec> direction;  // rank-one direction the form was reduced along
  std::optional<KVec> maximizer;
  std::vector<Checkpoint> checkpoints;

  Constraint constraint() const;
};

std::vector<std::string> catalog_names();
/// One-line description; available for every name, including notes-only ones.
std::string catalog_note(const std::string& name);
/// Throws ValidationError for unknown names and UnsupportedError for entries
/// kept as notes only.
CatalogEntry catalog_entry(const std::string& name);

/// Special field and flux potential used by verify-bound. Throws
/// UnsupportedError for entries without one.
BoundSetup bound_setup(const CatalogEntry& entry);

/// Recomputes every checkpoint of the entry.
std::vector<CheckpointResult> run_checkpoints(const CatalogEntry& entry,
                                              const SearchConfig& cfg = {});

// Divergence-free 3x3 matrix fields (columns divergence free), row-major
// vectorization J_11, J_12, ..., J_33.

/// Two-parameter equality family at k: columns vec(k k^T - |k|^2 I) and
/// vec(eps . k), each with k^T H = 0.
Mat divfree3d_family(const KVec& k);

/// J = J0 + grad grad alpha - I lap alpha + eps . grad beta, as a flux potential
/// acting on (alpha, beta).
OperatorSymbol divfree3d_alpha_beta_potential();
/// J_il = eps_ijk d_j psi_kl: every divergence-free field is of this form.
OperatorSymbol divfree3d_curl_potential();

/// Special J field generated by scalar potentials alpha and beta (a U field
/// with two components) plus the constant J0.
FourierField divfree3d_special(const FourierField& alpha_beta, const Vec& j0);

/// Boundary integral of q . (x^T E0 + 2 grad alpha) over the faces of the box
/// [lo, hi], with q = J^T n and E0 = J0 + J0^T - tr(J0) I.
double divfree3d_boundary_functional(const FourierField& alpha_beta, const Vec& j0,
                                     const RVec& lo, const RVec& hi);
/// Integral of g(J) over the same box by tensor Gauss-Legendre quadrature.
double divfree3d_volume_functional(const FourierField& alpha_beta, const Vec& j0,
                                   const RVec& lo, const RVec& hi);

}  // namespace qstar
