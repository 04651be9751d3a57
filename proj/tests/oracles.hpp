#pragma once

// Independent reference implementations used only by the tests. They share
// no code with the library paths they check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<std::string> words(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text + " ") {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    return out;
}

/// Direct evaluation of the TF-IDF and BM25 sums by rescanning every text.
struct NaiveLexical {
    std::vector<std::vector<std::string>> docs;

    explicit NaiveLexical(const std::vector<std::string>& texts)
    {
        for (const auto& t : texts) {
            docs.push_back(words(t));
        }
    }

    double df(const std::string& term) const
    {
        double n = 0;
        for (const auto& d : docs) {
            n += std::count(d.begin(), d.end(), term) > 0 ? 1 : 0;
        }
        return n;
    }

    double avgdl() const
    {
        double total = 0;
        for (const auto& d : docs) {
            total += static_cast<double>(d.size());
        }
        return total / static_cast<double>(docs.size());
    }

    std::set<std::string> query_terms(const std::string& query) const
    {
        auto q = words(query);
        return {q.begin(), q.end()};
    }

    double tfidf(const std::string& query, std::size_t doc) const
    {
        double s = 0;
        double n = static_cast<double>(docs.size());
        for (const auto& term : query_terms(query)) {
            double tf = static_cast<double>(std::count(docs[doc].begin(), docs[doc].end(), term));
            if (tf > 0) {
                s += std::sqrt(tf / static_cast<double>(docs[doc].size())) * std::log(n / (df(term) + 1));
            }
        }
        return s;
    }

    double bm25(const std::string& query, std::size_t doc, double k = 1.2, double b = 0.75) const
    {
        double s = 0;
        double n = static_cast<double>(docs.size());
        double len = static_cast<double>(docs[doc].size());
        for (const auto& term : query_terms(query)) {
            double tf = static_cast<double>(std::count(docs[doc].begin(), docs[doc].end(), term));
            if (tf > 0) {
                double f = df(term);
                s += tf * (k + 1) / (tf + k * (1 - b + b * len / avgdl())) * std::log((n - f + 0.5) / (f + 0.5));
            }
        }
        return s;
    }

    bool matches(const std::string& query, std::size_t doc) const
    {
        for (const auto& term : query_terms(query)) {
            if (std::count(docs[doc].begin(), docs[doc].end(), term) > 0) {
                return true;
            }
        }
        return false;
    }
};

/// All-pairs shortest hop counts by Floyd-Warshall; -1 = unreachable.
inline std::vector<std::vector<int>> all_pairs_hops(std::size_t n, const std::vector<std::pair<int, int>>& edges)
{
    const int inf = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        d[i][i] = 0;
    }
    for (auto [a, b] : edges) {
        d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = std::min(d[a][b], 1);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
    }
    for (auto& row : d) {
        for (auto& x : row) {
            if (x >= inf) {
                x = -1;
            }
        }
    }
    return d;
}

inline long double cosine(const std::vector<float>& a, const std::vector<float>& b)
{
    long double dot = 0;
    long double na = 0;
    long double nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<long double>(a[i]) * b[i];
        na += static_cast<long double>(a[i]) * a[i];
        nb += static_cast<long double>(b[i]) * b[i];
    }
    return dot / std::sqrt(na * nb);
}

/// Partition objective straight from its definition.
inline double partition_objective(const std::vector<double>& rewards, const std::vector<int>& cluster,
                                  const std::vector<std::size_t>& subset)
{
    std::map<int, double> sums;
    for (auto i : subset) {
        sums[cluster[i]] += rewards[i];
    }
    double f = 0;
    for (const auto& [c, s] : sums) {
        f += std::sqrt(s);
    }
    return f;
}

/// Best value of f over all subsets of {0..n-1} with exactly min(k, n)
/// elements (monotone objectives peak at full budget).
inline std::pair<double, std::vector<std::size_t>> best_subset(
    std::size_t n, std::size_t k, const std::function<double(const std::vector<std::size_t>&)>& f)
{
    k = std::min(k, n);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> arg;
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) {
            continue;
        }
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1U << i)) {
                s.push_back(i);
            }
        }
        auto v = f(s);
        if (v > best) {
            best = v;
            arg = s;
        }
    }
    return {best, arg};
}

struct Metrics {
    double mrr = 0;
    std::map<std::size_t, double> f1;
    std::size_t n = 0;
};

/// Mean reciprocal rank and harmonic mean of averaged P@k and R@k.
inline Metrics naive_metrics(const std::map<std::string, std::vector<std::string>>& run,
                             const std::map<std::string, std::set<std::string>>& truth,
                             const std::vector<std::size_t>& ks)
{
    Metrics m;
    std::map<std::size_t, double> p;
    std::map<std::size_t, double> r;
    for (const auto& [q, t] : truth) {
        if (t.empty()) {
            continue;
        }
        ++m.n;
        const auto& pred = run.at(q);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (t.count(pred[i])) {
                m.mrr += 1.0 / static_cast<double>(i + 1);
                break;
            }
        }
        for (auto k : ks) {
            double hits = 0;
            for (std::size_t i = 0; i < pred.size() && i < k; ++i) {
                hits += t.count(pred[i]) ? 1 : 0;
            }
            p[k] += hits / static_cast<double>(k);
            r[k] += hits / static_cast<double>(t.size());
        }
    }
    if (m.n == 0) {
        return m;
    }
    m.mrr /= static_cast<double>(m.n);
    for (auto k : ks) {
        double pk = p[k] / static_cast<double>(m.n);
        double rk = r[k] / static_cast<double>(m.n);
        m.f1[k] = pk + rk > 0 ? 2 * pk * rk / (pk + rk) : 0;
    }
    return m;
}

}  // namespace oracle
