#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "spdelab/errors.hpp"
#include "spdelab/field.hpp"
#include "spdelab/model.hpp"

namespace spdelab {

/// A simple random variable: finitely many values with probabilities.
/// V is a Field or an Observation (a point of E x R).
template <typename V>
struct FiniteEnsemble {
    std::vector<double> weights;
    std::vector<V> values;

    std::size_t size() const { return values.size(); }

    void validate() const
    {
        if (weights.size() != values.size()) throw DimensionError("one weight per ensemble member is required");
        if (values.empty()) throw DomainError("ensemble is empty");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0)) throw DomainError("ensemble weights must be non-negative");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw DomainError("ensemble weights must sum to 1");
    }
};

/// The sigma-algebra generated by a partition of the ensemble's members.
struct FinitePartition {
    std::vector<int> atom_of;
    int n_atoms = 0;

    /// The trivial sigma-algebra: a single atom.
    static FinitePartition trivial(std::size_t n) { return {std::vector<int>(n, 0), 1}; }
    /// The full sigma-algebra: every member is its own atom.
    static FinitePartition discrete(std::size_t n)
    {
        FinitePartition p{std::vector<int>(n), static_cast<int>(n)};
        std::iota(p.atom_of.begin(), p.atom_of.end(), 0);
        return p;
    }
};

inline double value_norm(const Field& x) { return sup_norm(x); }
inline double value_norm(const Observation& y) { return norm(y); }

namespace detail {

inline std::vector<double> atom_weights(const std::vector<double>& weights, const FinitePartition& G)
{
    if (G.atom_of.size() != weights.size()) throw DimensionError("partition does not cover the ensemble");
    std::vector<double> mass(G.n_atoms, 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const int a = G.atom_of[i];
        if (a < 0 || a >= G.n_atoms) throw PartitionError("member assigned to missing atom " + std::to_string(a));
        mass[a] += weights[i];
    }
    for (int a = 0; a < G.n_atoms; ++a)
        if (!(mass[a] > 0)) throw PartitionError("atom " + std::to_string(a) + " has zero weight");
    return mass;
}

}  // namespace detail

/// E(Z|G): every member's value replaced by the weighted average over its atom.
template <typename V>
FiniteEnsemble<V> conditional_expectation(const FiniteEnsemble<V>& Z, const FinitePartition& G)
{
    Z.validate();
    const std::vector<double> mass = detail::atom_weights(Z.weights, G);
    std::vector<V> mean(G.n_atoms);
    std::vector<bool> started(G.n_atoms, false);
    for (std::size_t i = 0; i < Z.size(); ++i) {
        const int a = G.atom_of[i];
        const double w = Z.weights[i] / mass[a];
        if (!started[a]) {
            mean[a] = w * Z.values[i];
            started[a] = true;
        } else {
            mean[a] += w * Z.values[i];
        }
    }
    FiniteEnsemble<V> out{Z.weights, {}};
    out.values.reserve(Z.size());
    for (std::size_t i = 0; i < Z.size(); ++i) out.values.push_back(mean[G.atom_of[i]]);
    return out;
}

/// E|Z|^p in the norm of E (or E x R).
template <typename V>
double moment(const FiniteEnsemble<V>& Z, double p)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < Z.size(); ++i) acc += Z.weights[i] * std::pow(value_norm(Z.values[i]), p);
    return acc;
}

/// max over nodes and members of |E(Z|G)(xi) - E(Z(xi)|G)|, where the second
/// term conditions each node's scalar ensemble separately.
inline double locality_check(const FiniteEnsemble<Field>& Z, const FinitePartition& G)
{
    const FiniteEnsemble<Field> whole = conditional_expectation(Z, G);
    const Eigen::Index n = Z.values.front().size();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        FiniteEnsemble<Field> node{Z.weights, {}};
        node.values.reserve(Z.size());
        for (const Field& z : Z.values) node.values.push_back(Field::Constant(1, z[j]));
        const FiniteEnsemble<Field> pointwise = conditional_expectation(node, G);
        for (std::size_t i = 0; i < Z.size(); ++i)
            worst = std::max(worst, std::abs(whole.values[i][j] - pointwise.values[i][0]));
    }
    return worst;
}

}  // namespace spdelab
