#pragma once

#include "tgem/event_stream.hpp"
#include "tgem/horizon.hpp"
#include "tgem/model.hpp"

#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tgem {

/// Scores within this margin are treated as no improvement.
inline constexpr double kScoreEpsilon = 1e-9;

/// Forward kinds first; the enumerator order is the tie-break order.
enum class MoveKind { add, split, extend, remove, merge, truncate };

[[nodiscard]] const char* to_string(MoveKind kind) noexcept;
[[nodiscard]] bool is_forward(MoveKind kind) noexcept;

/// One operator application on the edge parent -> child. `interval` is the
/// interval being split, or the first interval of the pair being merged.
struct Move {
    MoveKind kind = MoveKind::add;
    LabelId parent = 0;
    LabelId child = 0;
    std::size_t interval = 0;
    double score_delta = 0.0;
};

enum class SearchPhase { forward, backward };

struct TraceStep {
    SearchPhase phase;
    Move move;
    double bic_after;
};

struct SearchTrace {
    double initial_bic = 0.0;
    std::vector<TraceStep> steps;
};

/// Optional limits on forward moves; unset means unlimited.
struct StructuralCaps {
    std::optional<std::size_t> max_indegree;
    std::optional<std::size_t> max_intervals;
};

struct SearchOptions {
    StructuralCaps caps;
    /// Threads used to score a neighborhood.
    std::size_t jobs = 1;
    /// Hard ceiling on accepted moves per phase; reaching it is an error.
    std::size_t max_iterations = 10000;
    /// Compare cached scores against a fresh whole-model BIC after every move.
    bool verify_cache = false;
};

/// Applies a move; throws std::invalid_argument if it is not legal for `model`.
/// Child rates are reset (refit by the caller).
[[nodiscard]] Tgem apply_move(const Tgem& model, const Move& move, const HorizonTable& horizons);

/// Local BIC terms memoized by (node, incoming edges with endpoints). Thread safe.
class LocalScoreCache {
public:
    explicit LocalScoreCache(const EventStream& stream) : stream_(stream) {}

    [[nodiscard]] double local(LabelId node, std::span<const ParentEdge> parents);
    [[nodiscard]] double bic(const Tgem& model);
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t hits() const;

private:
    const EventStream& stream_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, double> scores_;
    std::size_t hits_ = 0;
};

struct SearchResult {
    Tgem model;
    SearchTrace trace;
};

/// Greedy steepest-ascent BIC search over the recursive-TGEM operator space.
class StructureSearch {
public:
    StructureSearch(const EventStream& stream, HorizonTable horizons, SearchOptions options = {});

    /// Legal add/split/extend moves within the caps, with exact BIC deltas,
    /// in tie-break order (kind, parent, child, interval).
    [[nodiscard]] std::vector<Move> forward_neighborhood(const Tgem& model);
    /// Legal remove/merge/truncate moves with exact BIC deltas, in tie-break order.
    [[nodiscard]] std::vector<Move> backward_neighborhood(const Tgem& model);

    /// Applies the best move while it improves BIC by more than kScoreEpsilon.
    [[nodiscard]] SearchResult forward(Tgem start);
    [[nodiscard]] SearchResult backward(Tgem start);

    [[nodiscard]] double bic(const Tgem& model) { return cache_.bic(model); }
    [[nodiscard]] const HorizonTable& horizons() const noexcept { return horizons_; }
    [[nodiscard]] const LocalScoreCache& cache() const noexcept { return cache_; }

private:
    void score(const Tgem& model, std::vector<Move>& moves);
    SearchResult run(Tgem start, SearchPhase phase);

    const EventStream& stream_;
    HorizonTable horizons_;
    SearchOptions options_;
    LocalScoreCache cache_;
};

struct LearnResult {
    /// Learned structure with MLE rates.
    Tgem model;
    SearchTrace forward;
    SearchTrace backward;
    HorizonTable horizons;
    double empty_bic = 0.0;
    double final_bic = 0.0;
};

/// Forward search from the empty model followed by backward search, with
/// default horizons from `policy`; final rates are the MLE.
[[nodiscard]] LearnResult learn(const EventStream& stream, const HorizonPolicy& policy,
                                const SearchOptions& options = {});

/// JSON rendering of a trace, with labels resolved through `labels`.
[[nodiscard]] std::string trace_to_json(const LearnResult& result);

} // namespace tgem
