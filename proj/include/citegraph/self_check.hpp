#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "citegraph/inverted_index.hpp"
#include "citegraph/tokenizer.hpp"

namespace citegraph {

/// Scores one document by rescanning raw texts instead of using postings.
/// Kept as a cross-check for the index path.
double rescan_lexical_score(std::span<const std::string> texts, const Tokenizer& tokenizer, std::string_view query,
                            std::size_t doc, LexicalScorer scorer, const Bm25Params& params = {});

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs the built-in consistency checks: submodularity sampling of the
/// partition objective (plus a supermodular control that must be flagged),
/// index scores against a raw rescan on random corpora, and parallel
/// kernels against their serial references.
std::vector<CheckResult> run_self_checks(std::uint64_t seed, std::size_t trials);

}  // namespace citegraph
