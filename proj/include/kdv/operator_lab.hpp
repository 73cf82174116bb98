#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "kdv/diagnostics.hpp"
#include "kdv/grid.hpp"
#include "kdv/soliton.hpp"

namespace kdv::oplab {

using soliton::SolitonParams;

enum class OperatorKind {
  L,     // 4 - d_y^2 - 6 theta(y)
  K,     // 4c^2 - d_x^2 - 6 eta(x; a, c)
  MM_L,  // (4/3 + 2 y theta'(y) - 2 theta(y)) - d_y^2
};

/// Dense symmetric discretization: Fourier second-derivative matrix plus a
/// diagonal potential, on a periodic box standing in for the line.
struct OperatorMatrix {
  GridSpec grid;
  OperatorKind kind = OperatorKind::L;
  double center = 0.0;  // y = 0 for L and MM_L, x = a for K
  Eigen::MatrixXd matrix;
};

/// Periodic box [-20, 20) used for the line operators by default.
GridSpec default_line_grid(std::size_t N = 512);

/// Fourier differentiation matrices (first derivative drops the Nyquist mode).
Eigen::MatrixXd differentiation_matrix(const GridSpec& g, int order);
/// Euclidean Gram matrix of the discrete H^1 norm: I + D1^T D1.
Eigen::MatrixXd h1_gram(const GridSpec& g);

OperatorMatrix build_operator(OperatorKind kind, const GridSpec& g, const SolitonParams& p = {});

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;  // L^2-normalized grid function
};

/// k lowest eigenpairs, ascending. Eigenvectors are L^2 normalized, even
/// modes positive at the center, odd modes with positive slope there.
std::vector<Eigenpair> eigenpairs(const OperatorMatrix& op, std::size_t k);

enum class NormKind { L2, H1 };

/// Orthonormal (Euclidean) basis of grid functions with the given parity
/// about the box center; requires a box symmetric about 0.
Eigen::MatrixXd parity_basis(const GridSpec& g, bool odd);

/// min <A w, w> / ||w||^2 over w orthogonal to every constraint (and, when a
/// subspace basis is given, restricted to its span). ||.|| is L2 or H1.
/// Throws ValidationError if the constraints are linearly dependent.
double constrained_min_rayleigh(const OperatorMatrix& op, const std::vector<std::vector<double>>& constraints,
                                NormKind norm = NormKind::L2, const Eigen::MatrixXd* subspace = nullptr);
/// Same for an explicit symmetric matrix on the grid.
double constrained_min_rayleigh(const Eigen::MatrixXd& A, const GridSpec& g,
                                const std::vector<std::vector<double>>& constraints, NormKind norm,
                                const Eigen::MatrixXd* subspace = nullptr);

/// Matrix of the quadratic form
///   (3/2) <L w, w> + (6 / ||theta||^2) <w, y theta'> <w, theta^2>
/// (rank-one part symmetrized), with L the MM_L operator.
Eigen::MatrixXd mm_form_matrix(const GridSpec& g);

/// Minimum of the form over {w : <w, theta> = <w, y theta> = 0, ||w||_H1 = 1}.
double mm_positivity_check(const GridSpec& g);

struct ConstantEntry {
  std::string name;
  double computed = 0.0;
  double closed_form = 0.0;
  double reference = 0.0;  // published five/six significant digit value
  double tolerance = 0.0;
  bool pass = false;
};

/// <theta, f1>, ||theta||^2 - <theta, f1>^2, <y theta, f0>,
/// ||y theta||^2 - <y theta, f0>^2, ||theta||^2 and ||y theta||^2, using the
/// computed eigenfunctions.
std::vector<ConstantEntry> constants_check(const GridSpec& g = default_line_grid());

/// Two sides of the scaled local virial coercivity:
///   rhs = -<psi v, d_x K v> + <psi v, d_x eta> <d_x K v, (x-a) eta> / <d_x eta, (x-a) eta>
///   lhs = integral (v_x^2 + v^2) exp(-c |x - a| / A)
struct MMForm {
  double rhs = 0.0;
  double lhs = 0.0;
};

/// Spectral evaluation. Throws ValidationError when v violates the
/// orthogonality conditions by more than orth_tol (relative).
MMForm corollary_mm_form(const FieldState& v, const SolitonParams& p, const diag::VirialWeight& w,
                         double orth_tol = 1e-8);
/// Same quantity through dense K and differentiation matrices.
MMForm corollary_mm_form_matrix(const FieldState& v, const SolitonParams& p, const diag::VirialWeight& w);

/// 1/2 <K v, v> - integral v^3 through the dense K matrix.
double energy_functional_matrix(const FieldState& v, const SolitonParams& p);

}  // namespace kdv::oplab
