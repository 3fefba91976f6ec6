#include "rydgate/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rydgate::model {

namespace {

double distance(const AtomArray& a, int i, int j) {
    return (a.positions.row(i) - a.positions.row(j)).norm();
}

// Fills couplings and flags non-adjacent pairs close enough that the
// 1/64-scale interaction hierarchy starts to break down (closer than
// sqrt(2) r, the outer-outer distance of the four-branch star).
void finishArray(AtomArray& a, const std::vector<std::pair<int, int>>& edges) {
    const int n = a.atomCount();
    a.couplings = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = distance(a, i, j);
            if (d <= 0.0) throw ContractViolation("coincident atoms in array");
            a.couplings(i, j) = a.couplings(j, i) = a.c6 / std::pow(d, 6);
        }
    }
    auto isEdge = [&](int i, int j) {
        for (const auto& e : edges) {
            if ((e.first == i && e.second == j) || (e.first == j && e.second == i)) return true;
        }
        return false;
    };
    const double warnBelow = std::sqrt(2.0) * a.spacing * (1.0 - 1e-9);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (isEdge(i, j)) continue;
            const double d = distance(a, i, j);
            if (d < warnBelow) {
                std::ostringstream msg;
                msg << "atoms " << i << " and " << j << " are " << d / a.spacing
                    << " r apart; next-order couplings are not negligible";
                a.warnings.push_back(msg.str());
            }
        }
    }
}

void checkBranchCount(int k, bool allowAnyK) {
    if (k < 2) throw ContractViolation("star graph needs at least two branches");
    if (!allowAnyK && k > 4)
        throw ContractViolation("k > 4 leaves the blockade regime; pass allowAnyK to override");
}

}  // namespace

AtomArray buildStarGraph(int k, double b, double c6, bool allowAnyK) {
    return buildExtendedGraph(k, std::vector<int>(k, 0), b, c6, allowAnyK);
}

AtomArray buildExtendedGraph(int k, const std::vector<int>& aux, double b, double c6,
                             bool allowAnyK) {
    checkBranchCount(k, allowAnyK);
    if (static_cast<int>(aux.size()) != k)
        throw ContractViolation("aux counts must have one entry per branch");
    if (b <= 0.0 || c6 <= 0.0) throw ContractViolation("couplings must be positive");
    int total = 1 + k;
    for (int n : aux) {
        if (n < 0) throw ContractViolation("negative auxiliary count");
        total += n;
    }
    if (total > kMaxAtoms) throw ContractViolation("array exceeds the supported atom count");

    AtomArray a;
    a.k = k;
    a.c6 = c6;
    a.auxCounts = aux;
    a.spacing = std::pow(c6 / b, 1.0 / 6.0);
    a.positions.resize(total, 2);
    a.roles.reserve(total);
    a.branchOf.reserve(total);

    a.positions.row(0) << 0.0, 0.0;
    a.roles.push_back(AtomRole::Center);
    a.branchOf.push_back(-1);
    a.qubitAtoms.push_back(0);

    std::vector<std::pair<int, int>> edges;
    int idx = 1;
    for (int br = 0; br < k; ++br) {
        const double ang = 2.0 * std::numbers::pi * br / k;
        const Eigen::RowVector2d dir(std::cos(ang), std::sin(ang));
        int prev = 0;
        for (int j = 1; j <= aux[br] + 1; ++j) {
            a.positions.row(idx) = dir * (a.spacing * j);
            const bool outer = (j == aux[br] + 1);
            a.roles.push_back(outer ? AtomRole::Outer : AtomRole::Aux);
            a.branchOf.push_back(br);
            if (outer)
                a.qubitAtoms.push_back(idx);
            else
                a.auxAtoms.push_back(idx);
            edges.emplace_back(prev, idx);
            prev = idx;
            ++idx;
        }
    }
    finishArray(a, edges);
    return a;
}

AtomArray arrayFromPositions(const Eigen::Matrix<double, Eigen::Dynamic, 2>& positions,
                             const std::vector<AtomRole>& roles,
                             const std::vector<int>& branchOf, int k, double c6) {
    const int n = static_cast<int>(positions.rows());
    if (n < 3 || n > kMaxAtoms) throw ContractViolation("unsupported atom count");
    if (static_cast<int>(roles.size()) != n || static_cast<int>(branchOf.size()) != n)
        throw ContractViolation("roles and branches must match the position count");
    if (c6 <= 0.0) throw ContractViolation("c6 must be positive");

    AtomArray a;
    a.k = k;
    a.c6 = c6;
    a.positions = positions;
    a.roles = roles;
    a.branchOf = branchOf;
    a.auxCounts.assign(k, 0);

    // Typical nearest-neighbour spacing: the largest of the per-atom minimum
    // distances, so a single near-collision cannot hide itself.
    double spacing = 0.0;
    for (int i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (j != i) nearest = std::min(nearest, (positions.row(i) - positions.row(j)).norm());
        }
        spacing = std::max(spacing, nearest);
    }
    a.spacing = spacing;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if ((positions.row(i) - positions.row(j)).norm() < 0.1 * spacing)
                throw ContractViolation("atoms closer than a tenth of the lattice spacing");
        }
    }

    int centers = 0;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        if (roles[i] == AtomRole::Center) {
            ++centers;
            if (branchOf[i] != -1) throw ContractViolation("center must not belong to a branch");
            continue;
        }
        if (branchOf[i] < 0 || branchOf[i] >= k) throw ContractViolation("branch index out of range");
        if (roles[i] == AtomRole::Aux) {
            a.auxAtoms.push_back(i);
            ++a.auxCounts[branchOf[i]];
        }
        for (int j = i + 1; j < n; ++j) {
            if ((positions.row(i) - positions.row(j)).norm() <= 1.25 * spacing)
                edges.emplace_back(i, j);
        }
    }
    if (centers != 1) throw ContractViolation("exactly one center atom required");

    a.qubitAtoms.assign(1, -1);
    std::vector<int> outerOf(k, -1);
    for (int i = 0; i < n; ++i) {
        if (roles[i] == AtomRole::Center) a.qubitAtoms[0] = i;
        if (roles[i] == AtomRole::Outer) {
            if (outerOf[branchOf[i]] != -1)
                throw ContractViolation("two outer atoms on one branch");
            outerOf[branchOf[i]] = i;
        }
    }
    for (int br = 0; br < k; ++br) {
        if (outerOf[br] == -1) throw ContractViolation("branch without an outer atom");
        a.qubitAtoms.push_back(outerOf[br]);
    }
    finishArray(a, edges);
    return a;
}

std::string AtomArray::toJson() const {
    nlohmann::json j;
    j["k"] = k;
    j["c6"] = c6;
    j["spacing"] = spacing;
    j["auxCounts"] = auxCounts;
    for (int i = 0; i < atomCount(); ++i) {
        nlohmann::json atom;
        atom["x"] = positions(i, 0);
        atom["y"] = positions(i, 1);
        atom["role"] = roles[i] == AtomRole::Center ? "center"
                       : roles[i] == AtomRole::Outer ? "outer"
                                                     : "aux";
        atom["branch"] = branchOf[i];
        j["atoms"].push_back(atom);
    }
    for (int i = 0; i < atomCount(); ++i) {
        std::vector<double> row(couplings.row(i).data(), couplings.row(i).data() + atomCount());
        j["couplings"].push_back(row);
    }
    j["warnings"] = warnings;
    return j.dump(2);
}

int BasisMap::activeIndexOf(int atom) const {
    for (int i = 0; i < static_cast<int>(activeAtoms.size()); ++i) {
        if (activeAtoms[i] == atom) return i;
    }
    return -1;
}

BasisMap basisForInput(const AtomArray& array, const std::vector<int>& q) {
    if (static_cast<int>(q.size()) != array.k + 1)
        throw ContractViolation("input pattern must cover every qubit atom");
    for (int v : q) {
        if (v != 0 && v != 1) throw ContractViolation("input pattern entries must be bits");
    }
    BasisMap b;
    b.inputPattern = q;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 1) b.activeAtoms.push_back(array.qubitAtoms[i]);
    }
    b.activeAtoms.insert(b.activeAtoms.end(), array.auxAtoms.begin(), array.auxAtoms.end());
    std::sort(b.activeAtoms.begin(), b.activeAtoms.end());
    return b;
}

int misExcitations(const AtomArray& array, const std::vector<int>& q) {
    if (static_cast<int>(q.size()) != array.k + 1)
        throw ContractViolation("input pattern must cover every qubit atom");
    int count = 0;
    bool allEven = true;
    for (int br = 0; br < array.k; ++br) {
        const int l = array.auxCounts[br] + q[br + 1];
        count += (l + 1) / 2;
        if (l % 2 != 0) allEven = false;
    }
    if (q[0] == 1 && allEven) ++count;
    return count;
}

std::vector<int> canonicalMis(const AtomArray& array, const std::vector<int>& q) {
    if (static_cast<int>(q.size()) != array.k + 1)
        throw ContractViolation("input pattern must cover every qubit atom");
    // Per-branch chain of active atoms ordered centre -> outer.
    std::vector<std::vector<int>> chains(array.k);
    for (int i = 0; i < array.atomCount(); ++i) {
        const int br = array.branchOf[i];
        if (br < 0) continue;
        if (array.roles[i] == AtomRole::Aux || q[br + 1] == 1) chains[br].push_back(i);
    }
    for (auto& c : chains) {
        std::sort(c.begin(), c.end(), [&](int lhs, int rhs) {
            return array.positions.row(lhs).norm() < array.positions.row(rhs).norm();
        });
    }
    bool allEven = true;
    for (const auto& c : chains) {
        if (c.size() % 2 != 0) allEven = false;
    }
    std::vector<int> mis;
    const bool withCenter = (q[0] == 1 && allEven);
    if (withCenter) mis.push_back(array.qubitAtoms[0]);
    for (const auto& c : chains) {
        // Alternate along the chain; when the center is excited, start one
        // site further out so its neighbours stay in the ground state.
        for (std::size_t p = withCenter ? 1 : 0; p < c.size(); p += 2) mis.push_back(c[p]);
    }
    std::sort(mis.begin(), mis.end());
    return mis;
}

int parityOf(std::uint32_t basisState) { return (std::popcount(basisState) % 2 == 0) ? 1 : -1; }

GateHamiltonian GateHamiltonian::build(const AtomArray& array, const BasisMap& basis) {
    GateHamiltonian h;
    h.activeCount = static_cast<int>(basis.activeAtoms.size());
    h.dim = basis.dim();
    h.rydCount.resize(h.dim);
    h.pairEnergy = Eigen::VectorXd::Zero(h.dim);

    for (int ia = 0; ia < h.activeCount; ++ia) {
        for (int ib = ia + 1; ib < h.activeCount; ++ib) {
            Pair p;
            p.atomA = basis.activeAtoms[ia];
            p.atomB = basis.activeAtoms[ib];
            p.mask = (1u << ia) | (1u << ib);
            h.pairs.push_back(p);
        }
    }
    for (int s = 0; s < h.dim; ++s) {
        h.rydCount[s] = std::popcount(static_cast<std::uint32_t>(s));
        for (const auto& p : h.pairs) {
            if ((static_cast<std::uint32_t>(s) & p.mask) == p.mask)
                h.pairEnergy[s] += array.couplings(p.atomA, p.atomB);
        }
    }
    return h;
}

void GateHamiltonian::apply(double omega, double delta, double intScale, double gamma,
                            const qdyn::StateVector& psi, qdyn::StateVector& out) const {
    applyWith(pairEnergy, omega, delta, intScale, gamma, psi, out);
}

Eigen::VectorXd GateHamiltonian::pairEnergyFrom(
    const std::function<double(int, int)>& coupling) const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    for (const auto& p : pairs) {
        const double c = coupling(p.atomA, p.atomB);
        for (int s = 0; s < dim; ++s) {
            if ((static_cast<std::uint32_t>(s) & p.mask) == p.mask) e[s] += c;
        }
    }
    return e;
}

void GateHamiltonian::applyWith(const Eigen::VectorXd& pairE, double omega, double delta,
                                double intScale, double gamma, const qdyn::StateVector& psi,
                                qdyn::StateVector& out) const {
    const qdyn::Complex mi(0.0, -1.0);
    out.resize(dim);
    for (int s = 0; s < dim; ++s) {
        const qdyn::Complex diag(-delta * rydCount[s] + intScale * pairE[s],
                                 -0.5 * gamma * rydCount[s]);
        out[s] = mi * diag * psi[s];
    }
    const qdyn::Complex coup = mi * qdyn::Complex(0.5 * omega, 0.0);
    for (int a = 0; a < activeCount; ++a) {
        const int bit = 1 << a;
        for (int s = 0; s < dim; ++s) out[s] += coup * psi[s ^ bit];
    }
}

qdyn::ComplexMatrix assembleHamiltonian(const AtomArray& array, const BasisMap& basis,
                                        double omega, double delta, double intScale,
                                        double gamma) {
    const auto h = GateHamiltonian::build(array, basis);
    qdyn::ComplexMatrix m = qdyn::ComplexMatrix::Zero(h.dim, h.dim);
    for (int s = 0; s < h.dim; ++s) {
        m(s, s) = qdyn::Complex(-delta * h.rydCount[s] + intScale * h.pairEnergy[s],
                                -0.5 * gamma * h.rydCount[s]);
        for (int a = 0; a < h.activeCount; ++a) m(s ^ (1 << a), s) += 0.5 * omega;
    }
    return m;
}

std::vector<std::uint32_t> strongPairMasks(const AtomArray& array, const BasisMap& basis) {
    // Threshold against the strongest coupling anywhere in the array, not just
    // the active pairs: an input exciting only weakly coupled atoms (two star
    // outers, say) has no blockaded pair at all.
    const double maxC = array.couplings.maxCoeff();
    const int n = static_cast<int>(basis.activeAtoms.size());
    std::vector<std::uint32_t> masks;
    for (int ia = 0; ia < n; ++ia) {
        for (int ib = ia + 1; ib < n; ++ib) {
            if (array.couplings(basis.activeAtoms[ia], basis.activeAtoms[ib]) >= 0.5 * maxC)
                masks.push_back((1u << ia) | (1u << ib));
        }
    }
    return masks;
}

}  // namespace rydgate::model
