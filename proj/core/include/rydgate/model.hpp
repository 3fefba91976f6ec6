#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rydgate/common.hpp"
#include "rydgate/qdyn.hpp"

namespace rydgate::model {

enum class AtomRole { Center, Outer, Aux };

// Star / extended-star register. Atom 0 is the center; each branch is a
// straight chain of auxCounts[b] auxiliary atoms followed by one outer qubit
// atom, all at nearest-neighbour spacing r = (C6/B)^(1/6).
struct AtomArray {
    Eigen::Matrix<double, Eigen::Dynamic, 2> positions;  // um
    std::vector<AtomRole> roles;
    std::vector<int> branchOf;  // -1 for the center
    std::vector<int> auxCounts;
    int k = 0;
    double c6 = 0.0;            // rad/us * um^6
    Eigen::MatrixXd couplings;  // pairwise C6/d^6, rad/us
    std::vector<int> qubitAtoms;  // center first, then outer atoms by branch
    std::vector<int> auxAtoms;
    std::vector<std::string> warnings;

    int atomCount() const { return static_cast<int>(roles.size()); }
    bool isStar() const { return auxAtoms.empty(); }
    double spacing = 0.0;  // nearest-neighbour distance r
    std::string toJson() const;
};

inline constexpr int kMaxAtoms = 12;

// k outer atoms on a circle of radius r around the center, branch b at angle
// 2 pi b / k. Nearest-neighbour coupling equals b (rad/us).
AtomArray buildStarGraph(int k, double b, double c6, bool allowAnyK = false);

// Chains of aux[b] auxiliary atoms inserted between center and outer qubits.
AtomArray buildExtendedGraph(int k, const std::vector<int>& aux, double b, double c6,
                             bool allowAnyK = false);

// Arbitrary geometry (used for disorder studies). Throws on near-collisions.
AtomArray arrayFromPositions(const Eigen::Matrix<double, Eigen::Dynamic, 2>& positions,
                             const std::vector<AtomRole>& roles,
                             const std::vector<int>& branchOf, int k, double c6);

struct LevelScheme {
    double gammaR = 0.0;        // |r> decay, rad/us
    double gammaRPrime = 0.0;   // |r'> decay
    double gammaP = 0.0;        // intermediate |p> decay (transfer only)
};

// Active atoms for one computational input: qubit atoms prepared in |1> plus
// every auxiliary. Basis states are bitmasks over active atoms (set = |r>),
// so index 0 is the initial product state.
struct BasisMap {
    std::vector<int> inputPattern;  // q_0 .. q_k
    std::vector<int> activeAtoms;   // ascending array indices
    int dim() const { return 1 << static_cast<int>(activeAtoms.size()); }
    int activeIndexOf(int atom) const;
};

BasisMap basisForInput(const AtomArray& array, const std::vector<int>& q);

// Number of Rydberg excitations in the maximum independent set addressed by
// input q. With branch occupation l_b = aux_b + q_b the count is
// sum_b ceil(l_b/2), plus one for the center when q_0 = 1 and every l_b is
// even; stars (aux = 0) reduce to the familiar star-graph rule.
int misExcitations(const AtomArray& array, const std::vector<int>& q);

// One representative maximum independent set (atom indices). When the set is
// degenerate the alternation that excludes the center is chosen.
std::vector<int> canonicalMis(const AtomArray& array, const std::vector<int>& q);

// (-1)^(number of excited atoms) of a basis state.
int parityOf(std::uint32_t basisState);

// Dense Hamiltonian over the active basis:
//   H = -delta * N + (omega/2) * sum_i(|r_i><1_i| + h.c.)
//       + intScale * sum_{i<j} B_ij n_i n_j - (i/2) gamma * N.
// intScale is +1 during the first pulse and -lambda after the interaction
// flip; gamma is the Rydberg-state decay rate active during the segment.
qdyn::ComplexMatrix assembleHamiltonian(const AtomArray& array, const BasisMap& basis,
                                        double omega, double delta, double intScale,
                                        double gamma = 0.0);

// Matrix-free application of the same Hamiltonian, used by the propagator.
struct GateHamiltonian {
    int dim = 0;
    int activeCount = 0;
    Eigen::VectorXd rydCount;    // excitation number per basis state
    Eigen::VectorXd pairEnergy;  // static interaction energy per basis state
    struct Pair {
        int atomA, atomB;        // array indices
        std::uint32_t mask;
    };
    std::vector<Pair> pairs;

    static GateHamiltonian build(const AtomArray& array, const BasisMap& basis);

    // out = -i H psi with the static couplings.
    void apply(double omega, double delta, double intScale, double gamma,
               const qdyn::StateVector& psi, qdyn::StateVector& out) const;

    // Per-state interaction energy for externally supplied pair couplings
    // (time-dependent positions during thermal motion).
    Eigen::VectorXd pairEnergyFrom(const std::function<double(int, int)>& coupling) const;

    void applyWith(const Eigen::VectorXd& pairE, double omega, double delta, double intScale,
                   double gamma, const qdyn::StateVector& psi, qdyn::StateVector& out) const;
};

// Bitmasks of active-atom pairs whose coupling is within a factor two of the
// strongest one; basis states overlapping any such mask are blockade-violating.
std::vector<std::uint32_t> strongPairMasks(const AtomArray& array, const BasisMap& basis);

}  // namespace rydgate::model
