#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citegraph/corpus.hpp"
#include "citegraph/exec.hpp"

namespace citegraph {

/// Budgets used for reporting, matching the F1@k cut-offs.
inline constexpr std::array<std::size_t, 4> budget_sweep{10, 20, 50, 100};

enum class PartitionKey { authors, venue };

PartitionKey parse_partition_key(std::string_view name);
std::string_view to_string(PartitionKey key);

/// Disjoint clusters covering a candidate list, stored as one cluster index
/// per candidate. Clusters are numbered in ascending label order.
struct Partition {
    std::vector<std::uint32_t> cluster_of;
    std::vector<std::string> labels;

    [[nodiscard]] std::size_t num_clusters() const { return labels.size(); }

    /// Candidates with equal labels share a cluster.
    static Partition from_labels(std::span<const std::string> labels);
    /// Everything in one cluster.
    static Partition single(std::size_t num_candidates);
};

/// Cluster label of a document: its first author, or its venue. Documents
/// without one get a singleton cluster of their own.
std::string partition_label(const Document& doc, PartitionKey key);

Partition partition_documents(std::span<const Document* const> docs, PartitionKey key);

struct SelectionProblem {
    std::vector<std::string> candidates;
    std::size_t budget = 10;
    /// Aligned with candidates; must be >= 0.
    std::vector<double> rewards;
    std::optional<Partition> partition;

    /// Throws std::invalid_argument on an empty candidate list, a zero
    /// budget, duplicate ids, misaligned or negative/NaN rewards, or a
    /// partition that does not cover the candidates.
    void validate() const;

    /// Candidate position of `id`; throws std::invalid_argument when absent.
    [[nodiscard]] std::size_t position(std::string_view id) const;
};

/// Sum over clusters of sqrt(sum of selected rewards in the cluster),
/// evaluated from scratch. `selected` holds candidate positions.
double qai_objective(const SelectionProblem& problem, std::span<const std::size_t> selected);
/// Same, by id; throws for ids outside the candidate list.
double qai_objective(const SelectionProblem& problem, std::span<const std::string> selected_ids);

/// Set function driven by the greedy loop. Implementations keep the current
/// selection S internally.
class Objective {
  public:
    virtual ~Objective() = default;

    virtual void reset() = 0;
    /// f(S + {candidate}) - f(S).
    [[nodiscard]] virtual double gain(std::size_t candidate) const = 0;
    virtual void add(std::size_t candidate) = 0;
    /// f(S).
    [[nodiscard]] virtual double value() const = 0;
    [[nodiscard]] virtual bool monotone() const { return false; }
    /// True when gain() may be called concurrently.
    [[nodiscard]] virtual bool concurrent_gain() const { return false; }
};

/// Incremental form of qai_objective: one running reward sum per cluster,
/// so gain() is O(1).
class QaiObjective final : public Objective {
  public:
    /// Validates the problem and requires a partition. The problem must
    /// outlive this object.
    explicit QaiObjective(const SelectionProblem& problem);

    void reset() override;
    [[nodiscard]] double gain(std::size_t candidate) const override;
    void add(std::size_t candidate) override;
    [[nodiscard]] double value() const override;
    [[nodiscard]] bool monotone() const override { return true; }
    [[nodiscard]] bool concurrent_gain() const override { return true; }

  private:
    const SelectionProblem* m_problem;
    std::vector<double> m_cluster_sums;
};

/// f over candidate positions, evaluated from scratch.
using SetFunction = std::function<double(std::span<const std::size_t>)>;

/// Adapts a from-scratch SetFunction to the greedy interface.
class SetFunctionObjective final : public Objective {
  public:
    explicit SetFunctionObjective(SetFunction f, bool monotone = false);

    void reset() override;
    [[nodiscard]] double gain(std::size_t candidate) const override;
    void add(std::size_t candidate) override;
    [[nodiscard]] double value() const override { return m_value; }
    [[nodiscard]] bool monotone() const override { return m_monotone; }

  private:
    SetFunction m_f;
    bool m_monotone;
    std::vector<std::size_t> m_selected;
    double m_value = 0.0;
};

struct RecommendationList {
    std::vector<std::string> ids;
    /// Relevance of each selected item (the reward for greedy selection, the
    /// raw score for top-k ranking).
    std::vector<double> scores;
    /// Marginal gain at each step.
    std::vector<double> gains;
    /// f(S_i) after each step.
    std::vector<double> objective_trace;
    double objective = 0.0;
};

/// Greedy maximization under the budget: each step adds the unselected
/// candidate with the largest gain, ties going to the smaller id. Stops when
/// the budget or the candidates run out, or, for non-monotone objectives,
/// when the best gain is <= 0. The argmax scan runs in parallel when the
/// objective allows it; the pick is identical to the serial scan.
RecommendationList greedy_select(const SelectionProblem& problem, Objective& objective,
                                 Exec exec = Exec::parallel);

/// One JSON line per step: {"step", "picked", "gain", "objective"}, steps from 1.
void write_selection_trace(std::ostream& out, const RecommendationList& list);

/// r = max(score, 0). Throws std::invalid_argument on NaN.
std::map<std::string, double> build_rewards(const std::map<std::string, double>& scores);
std::vector<double> build_rewards(std::span<const double> scores);

struct SubmodularityWitness {
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
    std::size_t d;
    /// f(B + d) - f(B)
    double gain_b;
    /// f(A + d) - f(A)
    double gain_a;
};

struct SubmodularityReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::optional<SubmodularityWitness> first_violation;
};

/// Samples random A subset of B and d outside B over `num_candidates`
/// elements, and counts cases where f(B + d) - f(B) > f(A + d) - f(A) + 1e-9.
/// At most 15 candidates.
SubmodularityReport check_submodular(const SetFunction& f, std::size_t num_candidates, std::size_t trials,
                                     std::uint64_t seed);

}  // namespace citegraph
