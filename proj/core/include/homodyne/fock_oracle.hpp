#pragma once

// Brute-force truncated-Fock verifier.
//
// Works only with state vectors and ladder matrices on the product Fock
// basis. It reads OperatorPoly terms and ModeState parameters as plain data;
// it never calls the normal-ordering engine or the Gaussian moment code.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homodyne/mode_algebra.hpp"
#include "homodyne/mode_state.hpp"
#include "homodyne/network.hpp"

namespace homodyne {

inline constexpr std::size_t kDefaultOracleMaxDimension = 1'000'000;

struct FockConfig {
  int cutoff = 10;                 // max photons per mode, >= 2
  std::vector<ModeId> modes;       // tensor order; empty = derived from input
  std::size_t max_dimension = kDefaultOracleMaxDimension;
  double max_tail = 1e-12;         // probability mass allowed above the cutoff
};

// Product-basis state; mode k has stride (cutoff+1)^(n-1-k).
struct FockState {
  std::vector<ModeId> modes;
  int cutoff = 0;
  Eigen::VectorXcd amplitudes;

  std::size_t mode_index(const ModeId& mode) const;
};

// Truncated single-mode matrices, dimension cutoff+1.
Eigen::MatrixXcd lowering_matrix(int cutoff);
Eigen::MatrixXcd raising_matrix(int cutoff);

// Single-mode Fock vector for a vacuum, coherent or pure Gaussian state,
// truncated at the cutoff and renormalized. Throws OracleError for mixed
// states or when more than max_tail probability lies above the cutoff.
Eigen::VectorXcd prepare_mode(const ModeState& state, int cutoff, double max_tail);

// Kronecker product of per-mode vectors.
FockState product_state(const std::vector<ModeId>& modes, const std::vector<Eigen::VectorXcd>& factors,
                        const FockConfig& cfg);
FockState prepare_state(const StateAssignment& states, const FockConfig& cfg);

// Applies a single-mode matrix to one tensor factor.
Eigen::VectorXcd apply_to_mode(const Eigen::MatrixXcd& op, std::size_t mode_index, const FockState& basis,
                               const Eigen::VectorXcd& vec);

Complex oracle_expectation(const OperatorPoly& p, const FockState& state);
Complex oracle_expectation(const OperatorPoly& p, const StateAssignment& states, const FockConfig& cfg);

// Unitary on the truncated two-mode space (dimension (cutoff+1)^2, index
// n1 * (cutoff+1) + n2) with U^dag a_j U = sum_k m(j,k) a_k. Built per
// total-photon sector by exponentiating the mixing generator; exact on every
// retained amplitude.
Eigen::MatrixXcd two_mode_unitary(const Eigen::Matrix2cd& m, int cutoff);

// Schrodinger-picture run of the network from the product input state;
// returns <n> at every detector.
std::map<std::string, double> oracle_network(const Network& net, const StateAssignment& states,
                                             const FockConfig& cfg, Sideband sideband = Sideband::None);

}  // namespace homodyne
