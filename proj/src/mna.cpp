#include "plexsim/mna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "plexsim/errors.hpp"

namespace plexsim {

namespace {

std::vector<CircuitEdge> to_circuit_edges(const PlexusGraph& graph) {
    std::vector<CircuitEdge> edges;
    edges.reserve(graph.edge_count());
    for (const GraphEdge& e : graph.edges()) edges.push_back({e.a, e.b});
    return edges;
}

void validate_inputs(int num_nodes, const std::vector<CircuitEdge>& edges,
                     std::span<const double> conductances,
                     const std::vector<VoltageConstraint>& constraints) {
    if (num_nodes <= 0) throw std::invalid_argument("circuit needs at least one node");
    if (conductances.size() != edges.size()) {
        throw std::invalid_argument("conductance count does not match edge count");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.a < 0 || e.b < 0 || e.a >= num_nodes || e.b >= num_nodes || e.a == e.b) {
            throw std::invalid_argument("edge " + std::to_string(i) + " has invalid endpoints");
        }
        if (!(conductances[i] > 0.0) || !std::isfinite(conductances[i])) {
            throw std::invalid_argument("conductance of edge " + std::to_string(i) +
                                        " must be positive and finite");
        }
    }
    std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
    for (const VoltageConstraint& c : constraints) {
        if (c.node < 0 || c.node >= num_nodes) {
            throw std::invalid_argument("constraint on node " + std::to_string(c.node) +
                                        " outside circuit");
        }
        if (!std::isfinite(c.volts)) {
            throw std::invalid_argument("constraint voltage on node " +
                                        std::to_string(c.node) + " must be finite");
        }
        if (seen[c.node]) {
            throw std::invalid_argument("duplicate voltage constraint on node " +
                                        std::to_string(c.node));
        }
        seen[c.node] = 1;
    }
}

}  // namespace

MnaSystem::MnaSystem(int num_nodes, std::vector<CircuitEdge> edges,
                     std::vector<double> conductances_s,
                     std::vector<VoltageConstraint> constraints)
    : num_nodes_(num_nodes),
      edges_(std::move(edges)),
      conductances_s_(std::move(conductances_s)),
      constraints_(std::move(constraints)) {
    validate_inputs(num_nodes_, edges_, conductances_s_, constraints_);
}

Eigen::SparseMatrix<double> MnaSystem::block_matrix() const {
    const int n = num_nodes_;
    const int m = num_sources();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges_.size() * 4 + static_cast<std::size_t>(m) * 2);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto [a, b] = edges_[i];
        const double g = conductances_s_[i];
        trips.emplace_back(a, a, g);
        trips.emplace_back(b, b, g);
        trips.emplace_back(a, b, -g);
        trips.emplace_back(b, a, -g);
    }
    for (int j = 0; j < m; ++j) {
        trips.emplace_back(constraints_[j].node, n + j, 1.0);
        trips.emplace_back(n + j, constraints_[j].node, 1.0);
    }
    Eigen::SparseMatrix<double> mat(n + m, n + m);
    mat.setFromTriplets(trips.begin(), trips.end());
    mat.makeCompressed();
    return mat;
}

void MnaSystem::write_triplets(std::ostream& out) const {
    const Eigen::SparseMatrix<double> mat = block_matrix();
    out << "# rows " << mat.rows() << " cols " << mat.cols() << " nnz " << mat.nonZeros() << '\n';
    for (int k = 0; k < mat.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(mat, k); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

MnaSystem assemble(int num_nodes, std::vector<CircuitEdge> edges,
                   std::vector<double> conductances_s,
                   std::vector<VoltageConstraint> constraints) {
    return MnaSystem(num_nodes, std::move(edges), std::move(conductances_s),
                     std::move(constraints));
}

MnaSystem assemble(const PlexusGraph& graph, std::span<const double> conductances_s,
                   std::vector<VoltageConstraint> constraints) {
    return MnaSystem(static_cast<int>(graph.node_count()), to_circuit_edges(graph),
                     std::vector<double>(conductances_s.begin(), conductances_s.end()),
                     std::move(constraints));
}

MnaSolver::MnaSolver(int num_nodes, std::vector<CircuitEdge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
    std::vector<double> ones(edges_.size(), 1.0);
    validate_inputs(num_nodes_, edges_, ones, {});

    // Incidence lists (CSR) for Kirchhoff sums at source nodes.
    incident_start_.assign(num_nodes_ + 1, 0);
    for (const CircuitEdge& e : edges_) {
        ++incident_start_[e.a + 1];
        ++incident_start_[e.b + 1];
    }
    for (int i = 0; i < num_nodes_; ++i) incident_start_[i + 1] += incident_start_[i];
    incident_edge_.resize(edges_.size() * 2);
    incident_other_.resize(edges_.size() * 2);
    std::vector<int> cursor(incident_start_.begin(), incident_start_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto [a, b] = edges_[i];
        incident_edge_[cursor[a]] = static_cast<int>(i);
        incident_other_[cursor[a]++] = b;
        incident_edge_[cursor[b]] = static_cast<int>(i);
        incident_other_[cursor[b]++] = a;
    }

    // Connected components never change for a run; label them once.
    component_of_.assign(num_nodes_, -1);
    std::vector<NodeIndex> stack;
    for (int start = 0; start < num_nodes_; ++start) {
        if (component_of_[start] >= 0) continue;
        component_of_[start] = num_components_;
        stack.push_back(start);
        while (!stack.empty()) {
            const NodeIndex node = stack.back();
            stack.pop_back();
            for (int k = incident_start_[node]; k < incident_start_[node + 1]; ++k) {
                const NodeIndex other = incident_other_[k];
                if (component_of_[other] < 0) {
                    component_of_[other] = num_components_;
                    stack.push_back(other);
                }
            }
        }
        ++num_components_;
    }

    build_pattern();

    rhs_.resize(num_nodes_);
    voltage_.resize(num_nodes_);
    constraint_at_.assign(num_nodes_, -1);
    fixed_.assign(num_nodes_, 0);
    component_driven_.assign(num_components_, 0);
}

MnaSolver::MnaSolver(const PlexusGraph& graph)
    : MnaSolver(static_cast<int>(graph.node_count()), to_circuit_edges(graph)) {}

void MnaSolver::build_pattern() {
    // Pattern = Laplacian nonzeros plus every diagonal entry. Values change
    // per step (and constrained rows/columns are numerically zeroed), but
    // the stored pattern is fixed, so the symbolic analysis happens once.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges_.size() * 4 + num_nodes_);
    for (const CircuitEdge& e : edges_) {
        trips.emplace_back(e.a, e.a, 0.0);
        trips.emplace_back(e.b, e.b, 0.0);
        trips.emplace_back(e.a, e.b, 0.0);
        trips.emplace_back(e.b, e.a, 0.0);
    }
    for (int i = 0; i < num_nodes_; ++i) trips.emplace_back(i, i, 0.0);
    matrix_.resize(num_nodes_, num_nodes_);
    matrix_.setFromTriplets(trips.begin(), trips.end());
    matrix_.makeCompressed();

    diag_slot_.resize(num_nodes_);
    for (int i = 0; i < num_nodes_; ++i) diag_slot_[i] = slot_of(i, i);
    edge_slots_.resize(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto [a, b] = edges_[i];
        edge_slots_[i] = {slot_of(a, a), slot_of(b, b), slot_of(a, b), slot_of(b, a)};
    }

    ldlt_.analyzePattern(matrix_);
}

int MnaSolver::slot_of(NodeIndex row, NodeIndex col) const {
    const int* outer = matrix_.outerIndexPtr();
    const int* inner = matrix_.innerIndexPtr();
    const int* begin = inner + outer[col];
    const int* end = inner + outer[col + 1];
    const int* it = std::lower_bound(begin, end, row);
    return static_cast<int>(it - inner);
}

MnaSolution MnaSolver::solve(std::span<const double> conductances_s,
                             const std::vector<VoltageConstraint>& constraints) {
    validate_inputs(num_nodes_, edges_, conductances_s, constraints);

    MnaSolution sol;
    sol.node_voltages.assign(num_nodes_, 0.0);
    sol.source_currents.assign(constraints.size(), 0.0);
    if (constraints.empty()) return sol;  // fully floating network

    std::fill(component_driven_.begin(), component_driven_.end(), 0);
    for (const VoltageConstraint& c : constraints) {
        component_driven_[component_of_[c.node]] = 1;
    }

    // A node is "fixed" when a source pins it or when its whole component is
    // undriven (held at 0 V, the float rule).
    for (int i = 0; i < num_nodes_; ++i) {
        constraint_at_[i] = -1;
        fixed_[i] = component_driven_[component_of_[i]] ? 0 : 1;
    }
    std::vector<double> fixed_volts(num_nodes_, 0.0);
    for (std::size_t j = 0; j < constraints.size(); ++j) {
        const auto& c = constraints[j];
        constraint_at_[c.node] = static_cast<int>(j);
        fixed_[c.node] = 1;
        fixed_volts[c.node] = c.volts;
    }

    const double scale =
        conductances_s.empty()
            ? 1.0
            : *std::min_element(conductances_s.begin(), conductances_s.end());

    double* values = matrix_.valuePtr();
    std::fill(values, values + matrix_.nonZeros(), 0.0);
    rhs_.setZero();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto [a, b] = edges_[i];
        const double g = conductances_s[i] / scale;
        const bool a_free = !fixed_[a];
        const bool b_free = !fixed_[b];
        const EdgeSlots& s = edge_slots_[i];
        if (a_free) values[s.aa] += g;
        if (b_free) values[s.bb] += g;
        if (a_free && b_free) {
            values[s.ab] -= g;
            values[s.ba] -= g;
        } else if (a_free) {
            rhs_[a] += g * fixed_volts[b];
        } else if (b_free) {
            rhs_[b] += g * fixed_volts[a];
        }
    }
    for (int i = 0; i < num_nodes_; ++i) {
        if (fixed_[i]) {
            values[diag_slot_[i]] = 1.0;
            rhs_[i] = fixed_volts[i];
        }
    }

    ldlt_.factorize(matrix_);
    if (ldlt_.info() != Eigen::Success) {
        throw NumericalError("MNA factorization failed (" + std::to_string(num_nodes_) +
                             " nodes, " + std::to_string(constraints.size()) + " sources)");
    }
    voltage_ = ldlt_.solve(rhs_);

    // One refinement pass if rounding left a visible residual.
    const double rhs_norm = std::max(rhs_.lpNorm<Eigen::Infinity>(),
                                     std::numeric_limits<double>::min());
    Eigen::VectorXd residual = matrix_ * voltage_ - rhs_;
    double rel = residual.lpNorm<Eigen::Infinity>() / rhs_norm;
    if (rel > 1e-13) {
        voltage_ -= ldlt_.solve(residual);
        residual = matrix_ * voltage_ - rhs_;
        rel = residual.lpNorm<Eigen::Infinity>() / rhs_norm;
    }
    if (!(rel < 1e-8) || !voltage_.allFinite()) {
        throw NumericalError("MNA solve did not converge (relative residual " +
                             std::to_string(rel) + ")");
    }

    for (int i = 0; i < num_nodes_; ++i) {
        sol.node_voltages[i] = fixed_[i] ? fixed_volts[i] : voltage_[i];
    }
    // Source current, positive from the network into the electrode: the
    // negated Kirchhoff sum of the incident edge currents, using the
    // unscaled conductances.
    for (std::size_t j = 0; j < constraints.size(); ++j) {
        const NodeIndex n = constraints[j].node;
        double out_of_node = 0.0;
        for (int k = incident_start_[n]; k < incident_start_[n + 1]; ++k) {
            const double g = conductances_s[incident_edge_[k]];
            out_of_node += g * (sol.node_voltages[n] - sol.node_voltages[incident_other_[k]]);
        }
        sol.source_currents[j] = -out_of_node;
    }
    return sol;
}

MnaSolution solve(const MnaSystem& system) {
    if (system.constraints().empty()) {
        throw std::invalid_argument(
            "system has no voltage constraints; use solve_floating for undriven networks");
    }
    return solve_floating(system);
}

MnaSolution solve_floating(const MnaSystem& system) {
    MnaSolver solver(system.num_nodes(), system.edges());
    return solver.solve(system.conductances(), system.constraints());
}

MnaSolution solve_floating(const PlexusGraph& graph, std::span<const double> conductances_s,
                           const std::vector<VoltageConstraint>& constraints) {
    MnaSolver solver(graph);
    return solver.solve(conductances_s, constraints);
}

}  // namespace plexsim
