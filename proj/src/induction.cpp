#include "wxmood/induction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "wxmood/errors.hpp"
#include "wxmood/parallel.hpp"

namespace wxmood {

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> counts)
    : tokens_(std::move(tokens)), counts_(std::move(counts)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i)
        index_.emplace(tokens_[i], i);
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

Vocabulary build_vocabulary(const Documents& docs, std::size_t min_count, const std::set<std::string>& always_keep) {
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& doc : docs)
        for (const auto& t : doc)
            ++freq[t];
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [t, c] : freq)
        if (c >= min_count || always_keep.contains(t))
            kept.emplace_back(t, c);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> tokens;
    std::vector<std::size_t> counts;
    for (auto& [t, c] : kept) {
        tokens.push_back(std::move(t));
        counts.push_back(c);
    }
    return Vocabulary(std::move(tokens), std::move(counts));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto first = cols.begin() + static_cast<std::ptrdiff_t>(offsets[i]);
    const auto last = cols.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]);
    auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
    if (it == last || *it != j)
        return 0.0;
    return vals[static_cast<std::size_t>(it - cols.begin())];
}

namespace {

SparseMatrix from_sorted_keys(std::size_t n, const std::vector<std::uint64_t>& keys) {
    SparseMatrix m;
    m.n = n;
    m.offsets.assign(n + 1, 0);
    for (std::size_t k = 0; k < keys.size();) {
        std::size_t run = k;
        while (run < keys.size() && keys[run] == keys[k])
            ++run;
        const auto row = static_cast<std::size_t>(keys[k] >> 32);
        m.cols.push_back(static_cast<std::uint32_t>(keys[k] & 0xFFFFFFFFu));
        m.vals.push_back(static_cast<double>(run - k));
        ++m.offsets[row + 1];
        k = run;
    }
    for (std::size_t i = 0; i < n; ++i)
        m.offsets[i + 1] += m.offsets[i];
    return m;
}

} // namespace

SparseMatrix cooccurrence(const Documents& docs, const Vocabulary& vocab, std::size_t window, unsigned threads) {
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, docs.size()));
    const std::size_t per = (docs.size() + chunks - 1) / std::max<std::size_t>(1, chunks);
    std::vector<std::vector<std::uint64_t>> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto& keys = parts[c];
        std::vector<std::int64_t> ids;
        for (std::size_t d = c * per; d < std::min(docs.size(), (c + 1) * per); ++d) {
            ids.clear();
            for (const auto& t : docs[d]) {
                const auto idx = vocab.find(t);
                ids.push_back(idx ? static_cast<std::int64_t>(*idx) : -1);
            }
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (ids[i] < 0)
                    continue;
                for (std::size_t j = i + 1; j < ids.size() && j - i <= window; ++j) {
                    if (ids[j] < 0 || ids[j] == ids[i])
                        continue;
                    const auto a = static_cast<std::uint64_t>(ids[i]);
                    const auto b = static_cast<std::uint64_t>(ids[j]);
                    keys.push_back((a << 32) | b);
                    keys.push_back((b << 32) | a);
                }
            }
        }
        std::sort(keys.begin(), keys.end());
    });
    std::vector<std::uint64_t> merged;
    for (auto& p : parts) {
        const auto mid = merged.size();
        merged.insert(merged.end(), p.begin(), p.end());
        std::inplace_merge(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(mid), merged.end());
        std::vector<std::uint64_t>().swap(p);
    }
    return from_sorted_keys(vocab.size(), merged);
}

SparseMatrix ppmi(const SparseMatrix& counts) {
    std::vector<double> row_sum(counts.n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < counts.n; ++i) {
        for (std::size_t k = counts.offsets[i]; k < counts.offsets[i + 1]; ++k)
            row_sum[i] += counts.vals[k];
        total += row_sum[i];
    }
    SparseMatrix out;
    out.n = counts.n;
    out.offsets.assign(counts.n + 1, 0);
    for (std::size_t i = 0; i < counts.n; ++i) {
        for (std::size_t k = counts.offsets[i]; k < counts.offsets[i + 1]; ++k) {
            const std::size_t j = counts.cols[k];
            const double v = std::log(counts.vals[k] * total / (row_sum[i] * row_sum[j]));
            if (v > 0.0) {
                out.cols.push_back(counts.cols[k]);
                out.vals.push_back(v);
            }
        }
        out.offsets[i + 1] = out.cols.size();
    }
    return out;
}

namespace {

// PPMI rows with the self-entry added; rows stay sorted by column.
SparseMatrix augment(const SparseMatrix& m) {
    SparseMatrix out;
    out.n = m.n;
    out.offsets.assign(m.n + 1, 0);
    for (std::size_t i = 0; i < m.n; ++i) {
        double top = 0.0;
        for (std::size_t k = m.offsets[i]; k < m.offsets[i + 1]; ++k)
            top = std::max(top, m.vals[k]);
        bool placed = top <= 0.0;
        for (std::size_t k = m.offsets[i]; k < m.offsets[i + 1]; ++k) {
            if (!placed && m.cols[k] > i) {
                out.cols.push_back(static_cast<std::uint32_t>(i));
                out.vals.push_back(top);
                placed = true;
            }
            out.cols.push_back(m.cols[k]);
            out.vals.push_back(m.vals[k]);
        }
        if (!placed) {
            out.cols.push_back(static_cast<std::uint32_t>(i));
            out.vals.push_back(top);
        }
        out.offsets[i + 1] = out.cols.size();
    }
    return out;
}

double row_norm(const SparseMatrix& m, std::size_t i) {
    double s = 0.0;
    for (std::size_t k = m.offsets[i]; k < m.offsets[i + 1]; ++k)
        s += m.vals[k] * m.vals[k];
    return std::sqrt(s);
}

} // namespace

double context_cosine(const SparseMatrix& ppmi_m, std::size_t a, std::size_t b) {
    const SparseMatrix aug = augment(ppmi_m);
    const double na = row_norm(aug, a), nb = row_norm(aug, b);
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    double dot = 0.0;
    std::size_t p = aug.offsets[a], q = aug.offsets[b];
    while (p < aug.offsets[a + 1] && q < aug.offsets[b + 1]) {
        if (aug.cols[p] < aug.cols[q]) {
            ++p;
        } else if (aug.cols[q] < aug.cols[p]) {
            ++q;
        } else {
            dot += aug.vals[p++] * aug.vals[q++];
        }
    }
    return dot / (na * nb);
}

AssociationGraph::AssociationGraph(Vocabulary vocab, SparseMatrix adjacency)
    : vocab_(std::move(vocab)), adj_(std::move(adjacency)), degree_(adj_.n, 0.0) {
    for (std::size_t i = 0; i < adj_.n; ++i)
        for (std::size_t k = adj_.offsets[i]; k < adj_.offsets[i + 1]; ++k)
            degree_[i] += adj_.vals[k];
}

std::span<const std::uint32_t> AssociationGraph::neighbors(std::size_t i) const {
    return {adj_.cols.data() + adj_.offsets[i], adj_.offsets[i + 1] - adj_.offsets[i]};
}

std::span<const double> AssociationGraph::weights(std::size_t i) const {
    return {adj_.vals.data() + adj_.offsets[i], adj_.offsets[i + 1] - adj_.offsets[i]};
}

AssociationGraph build_graph(const Documents& docs, const GraphParams& params) {
    if (docs.empty())
        throw DataError("build_graph: corpus is empty");
    Vocabulary vocab = build_vocabulary(docs, params.min_count, params.always_keep);
    if (vocab.empty())
        throw DataError(fmt::format("build_graph: no token occurs at least {} times (min_count)", params.min_count));
    const std::size_t n = vocab.size();
    const SparseMatrix aug = augment(ppmi(cooccurrence(docs, vocab, params.window, params.threads)));

    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i)
        norms[i] = row_norm(aug, i);

    // Top-k neighbours per node; the augmented matrix is symmetric, so its
    // rows double as the inverted index.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> top(n);
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(n, 64));
    const std::size_t per = (n + chunks - 1) / chunks;
    parallel_for(chunks, params.threads, [&](std::size_t c) {
        std::vector<double> dot(n, 0.0);
        std::vector<std::uint32_t> touched;
        for (std::size_t a = c * per; a < std::min(n, (c + 1) * per); ++a) {
            if (norms[a] == 0.0)
                continue;
            touched.clear();
            for (std::size_t p = aug.offsets[a]; p < aug.offsets[a + 1]; ++p) {
                const std::size_t f = aug.cols[p];
                const double va = aug.vals[p];
                for (std::size_t q = aug.offsets[f]; q < aug.offsets[f + 1]; ++q) {
                    const std::uint32_t b = aug.cols[q];
                    if (dot[b] == 0.0)
                        touched.push_back(b);
                    dot[b] += va * aug.vals[q];
                }
            }
            std::vector<std::pair<std::uint32_t, double>> cand;
            for (const auto b : touched) {
                if (b != a && dot[b] > 0.0)
                    cand.emplace_back(b, dot[b] / (norms[a] * norms[b]));
                dot[b] = 0.0;
            }
            auto better = [](const auto& x, const auto& y) {
                return x.second != y.second ? x.second > y.second : x.first < y.first;
            };
            const std::size_t k = std::min(params.k_neighbors, cand.size());
            std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(), better);
            cand.resize(k);
            top[a] = std::move(cand);
        }
    });

    // Union of directed choices; weight is the max over the two directions.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (std::size_t a = 0; a < n; ++a)
        for (const auto& [b, w] : top[a]) {
            rows[a].emplace_back(b, w);
            rows[b].emplace_back(static_cast<std::uint32_t>(a), w);
        }
    SparseMatrix adj;
    adj.n = n;
    adj.offsets.assign(n + 1, 0);
    for (std::size_t a = 0; a < n; ++a) {
        auto& r = rows[a];
        std::sort(r.begin(), r.end());
        for (std::size_t k = 0; k < r.size();) {
            std::size_t run = k;
            double w = 0.0;
            while (run < r.size() && r[run].first == r[k].first)
                w = std::max(w, r[run++].second);
            adj.cols.push_back(r[k].first);
            adj.vals.push_back(w);
            k = run;
        }
        adj.offsets[a + 1] = adj.cols.size();
        std::vector<std::pair<std::uint32_t, double>>().swap(r);
    }
    return AssociationGraph(std::move(vocab), std::move(adj));
}

std::vector<double> random_walk_with_restart(const AssociationGraph& graph, const std::vector<double>& restart,
                                             const PropagationParams& params, std::size_t* iterations) {
    const std::size_t n = graph.size();
    std::vector<double> p = restart, next(n), share(n);
    double residual = 0.0;
    for (std::size_t it = 1; it <= params.max_iter; ++it) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (graph.degree(i) > 0.0) {
                share[i] = p[i] / graph.degree(i);
            } else {
                share[i] = 0.0;
                dangling += p[i];
            }
        }
        const double jump = (1.0 - params.beta) + params.beta * dangling;
        parallel_for(n, params.threads, [&](std::size_t j) {
            double acc = 0.0;
            const auto nb = graph.neighbors(j);
            const auto w = graph.weights(j);
            for (std::size_t k = 0; k < nb.size(); ++k)
                acc += share[nb[k]] * w[k];
            next[j] = params.beta * acc + jump * restart[j];
        });
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            residual += std::abs(next[i] - p[i]);
        p.swap(next);
        if (residual < params.tol) {
            if (iterations)
                *iterations = it;
            return p;
        }
    }
    throw ConvergenceError(
        fmt::format("random walk did not converge in {} iterations (L1 residual {})", params.max_iter, residual),
        residual);
}

namespace {

std::vector<double> restart_vector(const AssociationGraph& graph, const SeedSet& side, const char* name,
                                   std::vector<std::string>& dropped) {
    std::vector<double> r(graph.size(), 0.0);
    double total = 0.0;
    for (const auto& [token, w] : side.weights) {
        const auto idx = graph.vocabulary().find(token);
        if (!idx) {
            dropped.push_back(token);
            continue;
        }
        r[*idx] = w;
        total += w;
    }
    if (total == 0.0)
        throw DataError(fmt::format("no {} seed word is in the vocabulary", name));
    for (auto& v : r)
        v /= total;
    return r;
}

std::vector<bool> reachable_from(const AssociationGraph& graph, const std::vector<double>& a,
                                 const std::vector<double>& b) {
    std::vector<bool> seen(graph.size(), false);
    std::queue<std::size_t> todo;
    for (std::size_t i = 0; i < graph.size(); ++i)
        if (a[i] > 0.0 || b[i] > 0.0) {
            seen[i] = true;
            todo.push(i);
        }
    while (!todo.empty()) {
        const auto i = todo.front();
        todo.pop();
        for (const auto j : graph.neighbors(i))
            if (!seen[j]) {
                seen[j] = true;
                todo.push(j);
            }
    }
    return seen;
}

} // namespace

PropagationResult propagate(const AssociationGraph& graph, const SeedPair& seeds, const PropagationParams& params,
                            std::string axis) {
    validate(seeds);
    if (!(params.beta > 0.0 && params.beta < 1.0))
        throw ConfigError(fmt::format("walk continue probability {} outside (0, 1)", params.beta));
    PropagationResult res;
    const auto r_pos = restart_vector(graph, seeds.positive, "positive", res.dropped_seeds);
    const auto r_neg = restart_vector(graph, seeds.negative, "negative", res.dropped_seeds);
    res.p_pos = random_walk_with_restart(graph, r_pos, params, &res.iterations_pos);
    res.p_neg = random_walk_with_restart(graph, r_neg, params, &res.iterations_neg);

    const std::size_t n = graph.size();
    const auto reach = reachable_from(graph, r_pos, r_neg);
    std::vector<double> raw(n, 0.0);
    double sum = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reach[i])
            continue;
        const double d = res.p_pos[i] + res.p_neg[i];
        raw[i] = d > 0.0 ? (res.p_pos[i] - res.p_neg[i]) / d : 0.0;
        sum += raw[i];
        ++m;
    }
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (reach[i])
            ss += (raw[i] - mean) * (raw[i] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(m));

    res.lexicon = Lexicon(std::move(axis));
    for (std::size_t i = 0; i < n; ++i) {
        double score = 0.0;
        if (!reach[i]) {
            res.unreachable.push_back(graph.vocabulary().token(i));
        } else if (sd > 0.0) {
            const double z = (raw[i] - mean) / sd;
            score = std::copysign(std::tanh(std::abs(z)), z);
        }
        res.lexicon.set(graph.vocabulary().token(i), score);
    }
    return res;
}

} // namespace wxmood
