#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <iosfwd>
#include <span>
#include <vector>

#include "plexsim/graph.hpp"

namespace plexsim {

/// Ideal voltage source pinning one node to `volts` (referenced to the
/// external ground). At most one constraint per node.
struct VoltageConstraint {
    NodeIndex node;
    double volts;
    int source_id;
};

/// Result of one solve. Source currents follow the constraint order and are
/// positive when current flows from the network into the electrode, so a
/// neuron's grounded in-electrode reports a non-negative inflow when the
/// plexus drives it.
struct MnaSolution {
    std::vector<double> node_voltages;    // V, one per node
    std::vector<double> source_currents;  // A, one per constraint
};

/// MNA works on plain connectivity, not on the full plexus type, so tests can
/// exercise paths, stars and disconnected circuits directly.
struct CircuitEdge {
    NodeIndex a;
    NodeIndex b;
};

/// Assembled block system [[G, B], [B^T, 0]] * [v; i] = [0; e]: G the
/// conductance-weighted graph Laplacian over all nodes, B the source
/// incidence matrix, e the constraint voltages.
class MnaSystem {
public:
    MnaSystem(int num_nodes, std::vector<CircuitEdge> edges,
              std::vector<double> conductances_s,
              std::vector<VoltageConstraint> constraints);

    [[nodiscard]] int num_nodes() const { return num_nodes_; }
    [[nodiscard]] int num_sources() const { return static_cast<int>(constraints_.size()); }
    [[nodiscard]] int dimension() const { return num_nodes_ + num_sources(); }
    [[nodiscard]] const std::vector<CircuitEdge>& edges() const { return edges_; }
    [[nodiscard]] const std::vector<double>& conductances() const { return conductances_s_; }
    [[nodiscard]] const std::vector<VoltageConstraint>& constraints() const { return constraints_; }

    /// Materializes the symmetric-indefinite block matrix (mostly for tests
    /// and debugging; the solver works on the reduced SPD form).
    [[nodiscard]] Eigen::SparseMatrix<double> block_matrix() const;

    /// Coordinate-format text dump, one `row col value` line per nonzero.
    void write_triplets(std::ostream& out) const;

private:
    int num_nodes_;
    std::vector<CircuitEdge> edges_;
    std::vector<double> conductances_s_;
    std::vector<VoltageConstraint> constraints_;
};

MnaSystem assemble(int num_nodes, std::vector<CircuitEdge> edges,
                   std::vector<double> conductances_s,
                   std::vector<VoltageConstraint> constraints);
MnaSystem assemble(const PlexusGraph& graph, std::span<const double> conductances_s,
                   std::vector<VoltageConstraint> constraints);

/// Solves the assembled system. Requires at least one constraint; connected
/// components without one are held at 0 V (no drive, zero current). Throws
/// NumericalError if the factorization or residual check fails.
MnaSolution solve(const MnaSystem& system);

/// Same float rule but with no preconditions: an empty constraint list is
/// legal and yields the all-zero solution.
MnaSolution solve_floating(const MnaSystem& system);
MnaSolution solve_floating(const PlexusGraph& graph, std::span<const double> conductances_s,
                           const std::vector<VoltageConstraint>& constraints);

/// Reusable solver bound to one fixed topology. The sparsity pattern and the
/// fill-reducing ordering are computed once; each solve only refreshes the
/// numeric values and refactorizes. Voltage constraints are eliminated into
/// the right-hand side, leaving an SPD system over the free nodes that a
/// sparse Cholesky handles; the conductance block is rescaled by the smallest
/// conductance so pivots stay O(1)-O(10^2).
///
/// Not safe for concurrent use; run one instance per simulation.
class MnaSolver {
public:
    MnaSolver(int num_nodes, std::vector<CircuitEdge> edges);
    explicit MnaSolver(const PlexusGraph& graph);

    /// Float rule applies; empty constraints give the all-zero solution.
    MnaSolution solve(std::span<const double> conductances_s,
                      const std::vector<VoltageConstraint>& constraints);

    [[nodiscard]] int num_nodes() const { return num_nodes_; }
    [[nodiscard]] int num_components() const { return num_components_; }

private:
    void build_pattern();
    [[nodiscard]] int slot_of(NodeIndex row, NodeIndex col) const;

    int num_nodes_;
    std::vector<CircuitEdge> edges_;

    std::vector<int> component_of_;
    int num_components_ = 0;

    // Incident edges per node, CSR layout, for source-current evaluation.
    std::vector<int> incident_start_;
    std::vector<int> incident_edge_;
    std::vector<NodeIndex> incident_other_;

    Eigen::SparseMatrix<double> matrix_;  // n x n, Laplacian pattern + diagonal
    std::vector<int> diag_slot_;
    struct EdgeSlots {
        int aa, bb, ab, ba;
    };
    std::vector<EdgeSlots> edge_slots_;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;

    // Per-solve scratch, kept to avoid reallocation in the step loop.
    Eigen::VectorXd rhs_;
    Eigen::VectorXd voltage_;
    std::vector<int> constraint_at_;  // node -> constraint idx or -1
    std::vector<char> fixed_;
    std::vector<char> component_driven_;
};

}  // namespace plexsim
