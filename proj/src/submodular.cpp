#include "citegraph/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace citegraph {

PartitionKey parse_partition_key(std::string_view name)
{
    if (name == "authors") {
        return PartitionKey::authors;
    }
    if (name == "venue") {
        return PartitionKey::venue;
    }
    throw std::invalid_argument("unknown partition key: " + std::string(name));
}

std::string_view to_string(PartitionKey key)
{
    return key == PartitionKey::authors ? "authors" : "venue";
}

Partition Partition::from_labels(std::span<const std::string> labels)
{
    Partition p;
    p.labels.assign(labels.begin(), labels.end());
    std::sort(p.labels.begin(), p.labels.end());
    p.labels.erase(std::unique(p.labels.begin(), p.labels.end()), p.labels.end());
    p.cluster_of.reserve(labels.size());
    for (const auto& label : labels) {
        auto it = std::lower_bound(p.labels.begin(), p.labels.end(), label);
        p.cluster_of.push_back(static_cast<std::uint32_t>(it - p.labels.begin()));
    }
    return p;
}

Partition Partition::single(std::size_t num_candidates)
{
    Partition p;
    p.labels = {""};
    p.cluster_of.assign(num_candidates, 0);
    return p;
}

std::string partition_label(const Document& doc, PartitionKey key)
{
    // \x1f cannot appear in a sane author or venue name, so singletons never collide
    if (key == PartitionKey::authors) {
        if (!doc.authors.empty() && !doc.authors.front().empty()) {
            return "a:" + doc.authors.front();
        }
    } else if (!doc.venue.empty()) {
        return "v:" + doc.venue;
    }
    return "\x1f" + doc.id;
}

Partition partition_documents(std::span<const Document* const> docs, PartitionKey key)
{
    std::vector<std::string> labels;
    labels.reserve(docs.size());
    for (const auto* doc : docs) {
        labels.push_back(partition_label(*doc, key));
    }
    return Partition::from_labels(labels);
}

void SelectionProblem::validate() const
{
    if (candidates.empty()) {
        throw std::invalid_argument("selection problem has no candidates");
    }
    if (budget == 0) {
        throw std::invalid_argument("selection budget must be at least 1");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& id : candidates) {
        if (!seen.insert(id).second) {
            throw std::invalid_argument("duplicate candidate id: " + id);
        }
    }
    if (rewards.size() != candidates.size()) {
        throw std::invalid_argument("rewards must be aligned with candidates");
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        if (!(rewards[i] >= 0.0) || !std::isfinite(rewards[i])) {
            throw std::invalid_argument("reward of candidate " + candidates[i] + " must be finite and >= 0");
        }
    }
    if (partition) {
        if (partition->cluster_of.size() != candidates.size() || partition->num_clusters() == 0) {
            throw std::invalid_argument("partition does not cover the candidate list");
        }
        for (auto c : partition->cluster_of) {
            if (c >= partition->num_clusters()) {
                throw std::invalid_argument("partition refers to a missing cluster");
            }
        }
    }
}

std::size_t SelectionProblem::position(std::string_view id) const
{
    auto it = std::find(candidates.begin(), candidates.end(), id);
    if (it == candidates.end()) {
        throw std::invalid_argument("id is not a candidate: " + std::string(id));
    }
    return static_cast<std::size_t>(it - candidates.begin());
}

double qai_objective(const SelectionProblem& problem, std::span<const std::size_t> selected)
{
    if (!problem.partition) {
        throw std::invalid_argument("qai_objective requires a partition");
    }
    const auto& partition = *problem.partition;
    std::vector<double> sums(partition.num_clusters(), 0.0);
    for (auto pos : selected) {
        if (pos >= problem.candidates.size()) {
            throw std::invalid_argument("selected position outside the candidate list");
        }
        auto r = problem.rewards[pos];
        if (!(r >= 0.0)) {
            throw std::invalid_argument("negative reward for candidate " + problem.candidates[pos]);
        }
        sums[partition.cluster_of[pos]] += r;
    }
    double total = 0.0;
    for (double s : sums) {
        total += std::sqrt(s);
    }
    return total;
}

double qai_objective(const SelectionProblem& problem, std::span<const std::string> selected_ids)
{
    std::vector<std::size_t> positions;
    positions.reserve(selected_ids.size());
    for (const auto& id : selected_ids) {
        positions.push_back(problem.position(id));
    }
    return qai_objective(problem, positions);
}

QaiObjective::QaiObjective(const SelectionProblem& problem) : m_problem(&problem)
{
    problem.validate();
    if (!problem.partition) {
        throw std::invalid_argument("QaiObjective requires a partition");
    }
    reset();
}

void QaiObjective::reset()
{
    m_cluster_sums.assign(m_problem->partition->num_clusters(), 0.0);
}

double QaiObjective::gain(std::size_t candidate) const
{
    auto s = m_cluster_sums[m_problem->partition->cluster_of[candidate]];
    return std::sqrt(s + m_problem->rewards[candidate]) - std::sqrt(s);
}

void QaiObjective::add(std::size_t candidate)
{
    m_cluster_sums[m_problem->partition->cluster_of[candidate]] += m_problem->rewards[candidate];
}

double QaiObjective::value() const
{
    double total = 0.0;
    for (double s : m_cluster_sums) {
        total += std::sqrt(s);
    }
    return total;
}

SetFunctionObjective::SetFunctionObjective(SetFunction f, bool monotone)
    : m_f(std::move(f)), m_monotone(monotone)
{
    reset();
}

void SetFunctionObjective::reset()
{
    m_selected.clear();
    m_value = m_f(m_selected);
}

double SetFunctionObjective::gain(std::size_t candidate) const
{
    auto with = m_selected;
    with.push_back(candidate);
    return m_f(with) - m_value;
}

void SetFunctionObjective::add(std::size_t candidate)
{
    m_selected.push_back(candidate);
    m_value = m_f(m_selected);
}

namespace {

struct Best {
    double gain = -std::numeric_limits<double>::infinity();
    std::size_t pos = std::numeric_limits<std::size_t>::max();
};

/// Total order: larger gain wins, then smaller id.
bool better(const SelectionProblem& problem, double gain, std::size_t pos, const Best& best)
{
    if (best.pos == std::numeric_limits<std::size_t>::max()) {
        return true;
    }
    if (gain != best.gain) {
        return gain > best.gain;
    }
    return problem.candidates[pos] < problem.candidates[best.pos];
}

Best argmax_serial(const SelectionProblem& problem, const Objective& objective,
                   const std::vector<std::uint8_t>& taken)
{
    Best best;
    for (std::size_t pos = 0; pos < problem.candidates.size(); ++pos) {
        if (taken[pos]) {
            continue;
        }
        auto g = objective.gain(pos);
        if (better(problem, g, pos, best)) {
            best = {g, pos};
        }
    }
    return best;
}

Best argmax_parallel(const SelectionProblem& problem, const Objective& objective,
                     const std::vector<std::uint8_t>& taken)
{
    Best best;
    auto n = static_cast<std::int64_t>(problem.candidates.size());
#pragma omp parallel
    {
        Best local;
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            auto pos = static_cast<std::size_t>(i);
            if (taken[pos]) {
                continue;
            }
            auto g = objective.gain(pos);
            if (better(problem, g, pos, local)) {
                local = {g, pos};
            }
        }
#pragma omp critical(citegraph_greedy_argmax)
        if (local.pos != std::numeric_limits<std::size_t>::max() && better(problem, local.gain, local.pos, best)) {
            best = local;
        }
    }
    return best;
}

}  // namespace

RecommendationList greedy_select(const SelectionProblem& problem, Objective& objective, Exec exec)
{
    problem.validate();
    objective.reset();
    bool parallel = exec == Exec::parallel && objective.concurrent_gain();

    RecommendationList list;
    std::vector<std::uint8_t> taken(problem.candidates.size(), 0);
    auto steps = std::min(problem.budget, problem.candidates.size());
    for (std::size_t step = 0; step < steps; ++step) {
        auto best = parallel ? argmax_parallel(problem, objective, taken) : argmax_serial(problem, objective, taken);
        if (!objective.monotone() && best.gain <= 0.0) {
            break;
        }
        objective.add(best.pos);
        taken[best.pos] = 1;
        list.ids.push_back(problem.candidates[best.pos]);
        list.scores.push_back(problem.rewards[best.pos]);
        list.gains.push_back(best.gain);
        list.objective_trace.push_back(objective.value());
    }
    list.objective = objective.value();
    return list;
}

void write_selection_trace(std::ostream& out, const RecommendationList& list)
{
    for (std::size_t i = 0; i < list.ids.size(); ++i) {
        nlohmann::ordered_json record;
        record["step"] = i + 1;
        record["picked"] = list.ids[i];
        record["gain"] = list.gains[i];
        record["objective"] = list.objective_trace[i];
        out << record.dump() << '\n';
    }
}

std::map<std::string, double> build_rewards(const std::map<std::string, double>& scores)
{
    std::map<std::string, double> rewards;
    for (const auto& [id, score] : scores) {
        if (std::isnan(score)) {
            throw std::invalid_argument("NaN relevance score for " + id);
        }
        rewards.emplace(id, std::max(score, 0.0));
    }
    return rewards;
}

std::vector<double> build_rewards(std::span<const double> scores)
{
    std::vector<double> rewards;
    rewards.reserve(scores.size());
    for (double score : scores) {
        if (std::isnan(score)) {
            throw std::invalid_argument("NaN relevance score");
        }
        rewards.push_back(std::max(score, 0.0));
    }
    return rewards;
}

SubmodularityReport check_submodular(const SetFunction& f, std::size_t num_candidates, std::size_t trials,
                                     std::uint64_t seed)
{
    if (num_candidates < 1 || num_candidates > 15) {
        throw std::invalid_argument("check_submodular supports 1 to 15 candidates");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, num_candidates - 1);
    SubmodularityReport report;
    report.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        auto d = pick(rng);
        auto bits = rng();
        std::vector<std::size_t> a;
        std::vector<std::size_t> b;
        for (std::size_t i = 0; i < num_candidates; ++i) {
            if (i == d || ((bits >> (2 * i)) & 1U) == 0) {
                continue;
            }
            b.push_back(i);
            if (((bits >> (2 * i + 1)) & 1U) != 0) {
                a.push_back(i);
            }
        }
        auto a_plus = a;
        a_plus.push_back(d);
        auto b_plus = b;
        b_plus.push_back(d);
        auto gain_a = f(a_plus) - f(a);
        auto gain_b = f(b_plus) - f(b);
        if (gain_b > gain_a + 1e-9) {
            if (report.violations == 0) {
                report.first_violation = SubmodularityWitness{a, b, d, gain_b, gain_a};
            }
            ++report.violations;
        }
    }
    return report;
}

}  // namespace citegraph
