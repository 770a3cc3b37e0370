#pragma once

// Weight combinatorics for CP^n = SU(n+1) / S(U(1) x U(n)).
//
// Weight basis. A weight of the maximal torus diag(t_0, ..., t_n) of SU(n+1) is an
// integer vector lambda in Z^{n+1} modulo (1, ..., 1). K = S(U(1) x U(n)) is isomorphic
// to U(n) through (z, A) -> A, and on the common torus t^lambda = prod_i t_i^{lambda_i - lambda_0}.
// A Weight therefore stores the U(n) torus coordinates u_i = lambda_i - lambda_0, i = 1..n.
// The central U(1) charge is the pairing with diag(n, -1, ..., -1), which equals -sum(u).
// The Weyl group of K permutes the u coordinates and fixes the charge.

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace solitonkit::rep {

inline constexpr int kMinRank = 2;
inline constexpr int kMaxRank = 8;

struct Weight {
  std::vector<int> u;

  int charge() const;
  bool dominant() const;  // u_1 >= u_2 >= ... >= u_n
  auto operator<=>(const Weight&) const = default;
};

std::string to_string(const Weight& w);

struct KModule {
  std::string name;
  int n = 0;
  std::map<Weight, long long> weights;

  long long dimension() const;
  long long multiplicity(const Weight& w) const;
  void add(const Weight& w, long long mult = 1);
  /// True when the multiset is invariant under permutations of the u coordinates.
  bool weyl_symmetric() const;
};

/// Weights of g^C = sl(n+1, C): the roots e_i - e_j and 0 with multiplicity n.
KModule adjoint_module(int n);
/// Weights of m^C: e_0 - e_j and e_j - e_0, j = 1..n.
KModule isotropy_module(int n);
/// Weights of S^2((m^C)^*): sums w_a + w_b, a <= b, over the dual isotropy weights.
KModule sym2_dual_isotropy(int n);

/// Full weight multiset of the irreducible K-module with dominant highest weight `highest`
/// (Freudenthal's formula with the standard form on Z^n, rho = (n-1, ..., 1, 0)).
KModule irreducible(int n, const Weight& highest);
/// Weyl dimension formula, for cross-checking Freudenthal.
long long weyl_dimension(const Weight& highest);

struct Summand {
  Weight highest;
  long long multiplicity = 0;
  long long dimension = 0;  // of one copy
};

/// Greedy highest-weight extraction. Throws PreconditionError when the multiset is not
/// Weyl-symmetric and IntegrityError when a subtraction would go negative.
std::vector<Summand> k_decompose(const KModule& m);

/// sum over irreducibles of mult_A(pi) * mult_B(pi).
long long hom_multiplicity(const KModule& a, const KModule& b);

struct CpnDeformationCount {
  int n = 0;
  long long dim_Z = 0;            // (n+1)^2 - 1 = dim su(n+1)
  long long dim_F = 0;            // eigenfunctions of the first nonzero eigenvalue, = dim su(n+1)
  long long dim_ker_T = 0;        // 2 dim su(n+1)
  long long hom_multiplicity = 0;  // dim Hom_K(g^C, S^2(m^*)^C), computed
  long long dim_im_psi1 = 0;      // ker T = Im psi_1 + Im psi_2, each a copy of su(n+1)
  long long dim_im_psi2 = 0;
  std::vector<Summand> adjoint_decomposition;
  std::vector<Summand> sym2_decomposition;
};

/// Requires n >= 2 (and n <= kMaxRank for the computed multiplicity).
CpnDeformationCount dim_Z_cpn(int n);

}  // namespace solitonkit::rep
