#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wxmood/lexicon.hpp"

namespace wxmood {

/// Tokens kept for the graph, ordered by frequency (descending) then token.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> counts);

    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    const std::string& token(std::size_t i) const { return tokens_[i]; }
    std::size_t count(std::size_t i) const { return counts_[i]; }
    std::optional<std::size_t> find(std::string_view token) const;

    const std::vector<std::string>& tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::vector<std::size_t> counts_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Tokenised documents (content tokens only).
using Documents = std::vector<std::vector<std::string>>;

/// Keeps tokens with count >= min_count, plus any token in `always_keep` that
/// occurs at least once.
Vocabulary build_vocabulary(const Documents& docs, std::size_t min_count, const std::set<std::string>& always_keep = {});

/// Square symmetric sparse matrix in CSR form; columns sorted within a row.
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> offsets{0};
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;

    std::size_t nnz() const { return cols.size(); }
    /// Entry (i, j), 0 when absent.
    double at(std::size_t i, std::size_t j) const;
};

/// Counts of ordered token pairs at distance 1..window within a document.
/// Out-of-vocabulary tokens keep their position but contribute no pairs;
/// pairs of a token with itself are skipped.
SparseMatrix cooccurrence(const Documents& docs, const Vocabulary& vocab, std::size_t window, unsigned threads = 1);

/// max(0, log(c_ab * T / (c_a * c_b))) over the nonzero counts.
SparseMatrix ppmi(const SparseMatrix& counts);

struct GraphParams {
    std::size_t window = 4;
    std::size_t min_count = 10;
    std::size_t k_neighbors = 25;
    std::set<std::string> always_keep;
    unsigned threads = 1;
};

class AssociationGraph {
public:
    AssociationGraph() = default;
    AssociationGraph(Vocabulary vocab, SparseMatrix adjacency);

    const Vocabulary& vocabulary() const { return vocab_; }
    std::size_t size() const { return vocab_.size(); }
    std::size_t edge_count() const { return adj_.nnz() / 2; }

    std::span<const std::uint32_t> neighbors(std::size_t i) const;
    std::span<const double> weights(std::size_t i) const;
    double weight(std::size_t i, std::size_t j) const { return adj_.at(i, j); }
    double degree(std::size_t i) const { return degree_[i]; }

    const SparseMatrix& adjacency() const { return adj_; }

private:
    Vocabulary vocab_;
    SparseMatrix adj_;
    std::vector<double> degree_;
};

/// Cosine similarity between rows of the PPMI matrix, each row augmented with
/// a self-entry equal to its largest value.
double context_cosine(const SparseMatrix& ppmi, std::size_t a, std::size_t b);

/// Union of each node's k most similar nodes (cosine > 0), ties broken by
/// index. Throws DataError when no token survives the frequency threshold.
AssociationGraph build_graph(const Documents& docs, const GraphParams& params = {});

struct PropagationParams {
    double beta = 0.85; // probability of continuing the walk
    double tol = 1e-8;  // L1 change between sweeps
    std::size_t max_iter = 10'000;
    unsigned threads = 1;
};

struct PropagationResult {
    Lexicon lexicon;
    std::vector<double> p_pos;
    std::vector<double> p_neg;
    std::size_t iterations_pos = 0;
    std::size_t iterations_neg = 0;
    std::vector<std::string> dropped_seeds;
    std::vector<std::string> unreachable;
};

/// Stationary distribution of a walk that follows an edge with probability
/// beta and otherwise jumps to `restart`. Throws ConvergenceError.
std::vector<double> random_walk_with_restart(const AssociationGraph& graph, const std::vector<double>& restart,
                                             const PropagationParams& params, std::size_t* iterations = nullptr);

/// Polarity of every vocabulary token from the two seed sides. Raw ratio
/// scores are standardised over tokens reachable from a seed and mapped to
/// [-1, 1] with tanh; unreachable tokens score 0.
PropagationResult propagate(const AssociationGraph& graph, const SeedPair& seeds, const PropagationParams& params = {},
                            std::string axis = "sentiment");

} // namespace wxmood
