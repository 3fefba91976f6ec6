#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydgate/common.hpp"
#include "rydgate/model.hpp"
#include "rydgate/units.hpp"
#include "support/oracles.hpp"

using namespace rydgate;

namespace {

constexpr double kOmega0 = 16.0 * std::numbers::pi;  // 2 pi x 8 MHz in rad/us
constexpr double kB = 6.0 * kOmega0;
constexpr double kC6 = 880e3 * units::kTwoPi;

std::vector<int> bits(int index, int n) {
    std::vector<int> q(n);
    for (int i = 0; i < n; ++i) q[i] = (index >> i) & 1;
    return q;
}

}  // namespace

TEST_CASE("star geometry puts outers on the blockade-radius circle") {
    for (int k : {2, 3, 4}) {
        CAPTURE(k);
        const auto array = model::buildStarGraph(k, kB, kC6);
        REQUIRE(array.atomCount() == k + 1);
        const double r = std::pow(kC6 / kB, 1.0 / 6.0);
        CHECK(array.spacing == doctest::Approx(r).epsilon(1e-12));
        CHECK(array.positions.row(0).norm() == doctest::Approx(0.0));
        for (int i = 1; i <= k; ++i) {
            CHECK(array.positions.row(i).norm() == doctest::Approx(r).epsilon(1e-12));
            CHECK(array.couplings(0, i) == doctest::Approx(kB).epsilon(1e-12));
        }
    }
}

TEST_CASE("outer-outer couplings follow the 1/d^6 geometry factors") {
    const auto k2 = model::buildStarGraph(2, kB, kC6);
    CHECK(k2.couplings(1, 2) == doctest::Approx(kB / 64.0).epsilon(1e-12));

    const auto k3 = model::buildStarGraph(3, kB, kC6);
    CHECK(k3.couplings(1, 2) == doctest::Approx(kB / 27.0).epsilon(1e-12));
    CHECK(k3.couplings(1, 3) == doctest::Approx(kB / 27.0).epsilon(1e-12));

    const auto k4 = model::buildStarGraph(4, kB, kC6);
    CHECK(k4.couplings(1, 2) == doctest::Approx(kB / 8.0).epsilon(1e-12));   // adjacent
    CHECK(k4.couplings(1, 3) == doctest::Approx(kB / 64.0).epsilon(1e-12));  // diagonal
}

TEST_CASE("star builder rejects unsupported k unless explicitly allowed") {
    CHECK_THROWS_AS(model::buildStarGraph(1, kB, kC6), ContractViolation);
    CHECK_THROWS_AS(model::buildStarGraph(5, kB, kC6), ContractViolation);
    const auto wide = model::buildStarGraph(5, kB, kC6, true);
    CHECK(wide.atomCount() == 6);
}

TEST_CASE("extended graphs chain auxiliaries at uniform spacing") {
    const auto array = model::buildExtendedGraph(2, {1, 1}, kB, kC6);
    REQUIRE(array.atomCount() == 5);
    CHECK(array.qubitAtoms.size() == 3);
    CHECK(array.auxAtoms.size() == 2);
    // Nearest neighbours along each branch couple at exactly B.
    for (int aux : array.auxAtoms) {
        CHECK(array.couplings(0, aux) == doctest::Approx(kB).epsilon(1e-12));
        int outer = -1;
        for (int qa : array.qubitAtoms) {
            if (qa != 0 && array.branchOf[qa] == array.branchOf[aux]) outer = qa;
        }
        REQUIRE(outer >= 0);
        CHECK(array.couplings(aux, outer) == doctest::Approx(kB).epsilon(1e-12));
        // Center and outer sit two spacings apart on the same line.
        CHECK(array.couplings(0, outer) == doctest::Approx(kB / 64.0).epsilon(1e-12));
    }
    CHECK(array.atomCount() <= model::kMaxAtoms);
    CHECK_THROWS_AS(model::buildExtendedGraph(2, {1}, kB, kC6), ContractViolation);
    CHECK_THROWS_AS(model::buildExtendedGraph(4, {2, 2, 2, 2}, kB, kC6), ContractViolation);
}

TEST_CASE("misExcitations agrees with brute-force independent sets") {
    std::vector<model::AtomArray> arrays;
    arrays.push_back(model::buildStarGraph(2, kB, kC6));
    arrays.push_back(model::buildStarGraph(3, kB, kC6));
    arrays.push_back(model::buildStarGraph(4, kB, kC6));
    arrays.push_back(model::buildExtendedGraph(2, {1, 1}, kB, kC6));
    arrays.push_back(model::buildExtendedGraph(2, {2, 1}, kB, kC6));
    arrays.push_back(model::buildExtendedGraph(3, {1, 1, 1}, kB, kC6));
    for (const auto& array : arrays) {
        CAPTURE(array.k);
        CAPTURE(array.atomCount());
        for (int idx = 0; idx < (1 << (array.k + 1)); ++idx) {
            const auto q = bits(idx, array.k + 1);
            const auto basis = model::basisForInput(array, q);
            const int nu = model::misExcitations(array, q);
            CHECK(nu == oracles::bruteForceMisSize(array, basis));
        }
    }
}

TEST_CASE("canonicalMis returns an independent set of the right size") {
    const auto array = model::buildExtendedGraph(2, {2, 1}, kB, kC6);
    const auto strongEdge = [&](int a, int b) {
        return array.couplings(a, b) >= 0.5 * array.couplings.maxCoeff();
    };
    for (int idx = 0; idx < 8; ++idx) {
        const auto q = bits(idx, 3);
        const auto mis = model::canonicalMis(array, q);
        CHECK(static_cast<int>(mis.size()) == model::misExcitations(array, q));
        for (std::size_t a = 0; a < mis.size(); ++a) {
            for (std::size_t b = a + 1; b < mis.size(); ++b) {
                CHECK_FALSE(strongEdge(mis[a], mis[b]));
            }
        }
    }
}

TEST_CASE("basis maps active atoms consistently") {
    const auto array = model::buildStarGraph(2, kB, kC6);
    const auto basis = model::basisForInput(array, {1, 0, 1});
    REQUIRE(basis.activeAtoms.size() == 2);  // center + second outer; no auxiliaries
    CHECK(basis.dim() == 4);
    for (std::size_t i = 0; i < basis.activeAtoms.size(); ++i) {
        CHECK(basis.activeIndexOf(basis.activeAtoms[i]) == static_cast<int>(i));
    }
    CHECK(basis.activeIndexOf(1) == -1);  // the |0> qubit is a spectator
    const auto ext = model::buildExtendedGraph(2, {1, 1}, kB, kC6);
    const auto extBasis = model::basisForInput(ext, {0, 0, 0});
    CHECK(extBasis.activeAtoms.size() == 2);  // auxiliaries are always driven
}

TEST_CASE("parityOf counts excitations mod 2") {
    CHECK(model::parityOf(0u) == 1);
    CHECK(model::parityOf(0b1u) == -1);
    CHECK(model::parityOf(0b101u) == 1);
    CHECK(model::parityOf(0b111u) == -1);
}

TEST_CASE("assembled Hamiltonian is Hermitian and matches the matrix-free path") {
    const auto array = model::buildStarGraph(3, kB, kC6);
    const auto basis = model::basisForInput(array, {1, 1, 1, 1});
    const double omega = 0.8 * kOmega0;
    const double delta = -1.3 * kOmega0;

    const auto h = model::assembleHamiltonian(array, basis, omega, delta, 1.0);
    CHECK(qdyn::isHermitian(h));

    const double gamma = 0.05;
    const auto hDecay = model::assembleHamiltonian(array, basis, omega, delta, -0.9, gamma);
    // Anti-Hermitian part is exactly -(i/2) gamma N.
    const Eigen::MatrixXcd anti = 0.5 * (hDecay + hDecay.adjoint()) - hDecay;
    const auto ham = model::GateHamiltonian::build(array, basis);
    for (int s = 0; s < basis.dim(); ++s) {
        CHECK(std::abs(anti(s, s) - qdyn::Complex(0.0, 0.5 * gamma * ham.rydCount(s))) < 1e-12);
    }

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    qdyn::StateVector psi(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) psi(i) = qdyn::Complex(u(rng), u(rng));
    psi.normalize();
    qdyn::StateVector viaApply(basis.dim());
    ham.apply(omega, delta, -0.9, gamma, psi, viaApply);
    const qdyn::StateVector direct = qdyn::Complex(0.0, -1.0) * (hDecay * psi);
    CHECK((viaApply - direct).norm() < 1e-12 * direct.norm());
}

TEST_CASE("pairEnergyFrom reproduces the static couplings") {
    const auto array = model::buildStarGraph(2, kB, kC6);
    const auto basis = model::basisForInput(array, {1, 1, 1});
    const auto ham = model::GateHamiltonian::build(array, basis);
    const auto pairE =
        ham.pairEnergyFrom([&](int a, int b) { return array.couplings(a, b); });
    CHECK((pairE - ham.pairEnergy).norm() < 1e-12 * ham.pairEnergy.norm());
}

TEST_CASE("strong pairs are judged against the strongest coupling in the array") {
    const auto array = model::buildStarGraph(2, kB, kC6);
    // Two outers only: their mutual B/64 coupling is far below blockade.
    const auto outers = model::basisForInput(array, {0, 1, 1});
    CHECK(model::strongPairMasks(array, outers).empty());
    CHECK(model::misExcitations(array, {0, 1, 1}) == 2);
    // Center + outer is a blockaded pair.
    const auto pair = model::basisForInput(array, {1, 1, 0});
    CHECK(model::strongPairMasks(array, pair).size() == 1);
}

TEST_CASE("geometry serializes to JSON with positions and couplings") {
    const auto array = model::buildStarGraph(2, kB, kC6);
    const auto doc = nlohmann::json::parse(array.toJson());
    CHECK(doc.contains("atoms"));
    CHECK(doc.contains("couplings"));
    CHECK(doc["atoms"].size() == 3);
    CHECK(doc["atoms"][0]["role"] == "center");
}

TEST_CASE("arrayFromPositions rejects near-collisions") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> pos(3, 2);
    pos << 0.0, 0.0, 5.0, 0.0, 5.0, 1e-9;
    const std::vector<model::AtomRole> roles{model::AtomRole::Center, model::AtomRole::Outer,
                                             model::AtomRole::Outer};
    const std::vector<int> branches{-1, 0, 1};
    CHECK_THROWS_AS(model::arrayFromPositions(pos, roles, branches, 2, kC6),
                    ContractViolation);
}
