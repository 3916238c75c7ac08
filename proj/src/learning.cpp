#include "tgem/learning.hpp"

#include "tgem/parallel.hpp"
#include "tgem/scoring.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tgem {

namespace {

std::string edge_name(const Tgem& model, const Move& m) {
    return model.label_name(m.parent) + " -> " + model.label_name(m.child);
}

// Incoming edges of move.child after applying the move.
std::vector<ParentEdge> moved_parents(const Tgem& model, const Move& move, const HorizonTable& horizons) {
    if (move.parent >= model.label_count() || move.child >= model.label_count()) {
        throw std::invalid_argument("move references an unknown label");
    }
    auto parents = model.parents(move.child);
    const auto it = std::find_if(parents.begin(), parents.end(),
                                 [&](const ParentEdge& pe) { return pe.parent == move.parent; });
    const bool exists = it != parents.end();
    auto illegal = [&](const std::string& why) {
        return std::invalid_argument(std::string("illegal ") + to_string(move.kind) + " on " +
                                     edge_name(model, move) + ": " + why);
    };
    if (move.kind == MoveKind::add) {
        if (exists) {
            throw illegal("edge already exists");
        }
        const auto& h = horizons.get(move.parent, move.child);
        if (!h) {
            throw illegal("no default horizon for this pair");
        }
        parents.insert(std::lower_bound(parents.begin(), parents.end(), move.parent,
                                        [](const ParentEdge& pe, LabelId p) { return pe.parent < p; }),
                       ParentEdge{move.parent, Timescale::single(*h)});
        return parents;
    }
    if (!exists) {
        throw illegal("edge does not exist");
    }
    auto& ts = it->timescale;
    auto& ep = ts.endpoints;
    switch (move.kind) {
    case MoveKind::split:
        if (move.interval >= ts.interval_count()) {
            throw illegal("interval index out of range");
        }
        ep.insert(ep.begin() + static_cast<std::ptrdiff_t>(move.interval),
                  (ts.lower(move.interval) + ts.upper(move.interval)) / 2.0);
        break;
    case MoveKind::extend:
        ep.push_back(2.0 * ts.horizon());
        break;
    case MoveKind::remove:
        if (ts.interval_count() != 1) {
            throw illegal("only single-interval edges can be removed");
        }
        parents.erase(it);
        break;
    case MoveKind::merge:
        if (move.interval + 1 >= ts.interval_count() ||
            ep[move.interval] != (ts.lower(move.interval) + ts.upper(move.interval + 1)) / 2.0) {
            throw illegal("intervals are not the halves of a split");
        }
        ep.erase(ep.begin() + static_cast<std::ptrdiff_t>(move.interval));
        break;
    case MoveKind::truncate: {
        const auto last = ts.interval_count() - 1;
        if (last == 0 || ts.upper(last) != 2.0 * ts.lower(last)) {
            throw illegal("last interval is not an extension");
        }
        ep.pop_back();
        break;
    }
    case MoveKind::add:
        break;
    }
    return parents;
}

bool improves(const Move& candidate, const Move* best) {
    return best == nullptr || candidate.score_delta > best->score_delta;
}

} // namespace

const char* to_string(MoveKind kind) noexcept {
    switch (kind) {
    case MoveKind::add: return "add";
    case MoveKind::split: return "split";
    case MoveKind::extend: return "extend";
    case MoveKind::remove: return "remove";
    case MoveKind::merge: return "merge";
    case MoveKind::truncate: return "truncate";
    }
    return "?";
}

bool is_forward(MoveKind kind) noexcept {
    return kind == MoveKind::add || kind == MoveKind::split || kind == MoveKind::extend;
}

Tgem apply_move(const Tgem& model, const Move& move, const HorizonTable& horizons) {
    Tgem out = model;
    out.set_parents(move.child, moved_parents(model, move, horizons));
    return out;
}

double LocalScoreCache::local(LabelId node, std::span<const ParentEdge> parents) {
    std::string key(sizeof node, '\0');
    std::memcpy(key.data(), &node, sizeof node);
    for (const auto& pe : parents) {
        key.append(reinterpret_cast<const char*>(&pe.parent), sizeof pe.parent);
        const auto count = pe.timescale.endpoints.size();
        key.append(reinterpret_cast<const char*>(&count), sizeof count);
        key.append(reinterpret_cast<const char*>(pe.timescale.endpoints.data()), count * sizeof(double));
    }
    {
        std::lock_guard lock(mutex_);
        if (const auto it = scores_.find(key); it != scores_.end()) {
            ++hits_;
            return it->second;
        }
    }
    const double value = local_score(stream_, node, parents);
    std::lock_guard lock(mutex_);
    scores_.emplace(std::move(key), value);
    return value;
}

double LocalScoreCache::bic(const Tgem& model) {
    double total = 0.0;
    for (LabelId l = 0; l < model.label_count(); ++l) {
        total += local(l, model.parents(l));
    }
    return total;
}

std::size_t LocalScoreCache::size() const {
    std::lock_guard lock(mutex_);
    return scores_.size();
}

std::size_t LocalScoreCache::hits() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

StructureSearch::StructureSearch(const EventStream& stream, HorizonTable horizons, SearchOptions options)
    : stream_(stream), horizons_(std::move(horizons)), options_(options), cache_(stream) {
    if (horizons_.label_count() != stream.label_count()) {
        throw std::invalid_argument("horizon table does not match the stream vocabulary");
    }
}

void StructureSearch::score(const Tgem& model, std::vector<Move>& moves) {
    parallel_for(moves.size(), options_.jobs, [&](std::size_t i) {
        auto& m = moves[i];
        const auto after = moved_parents(model, m, horizons_);
        m.score_delta = cache_.local(m.child, after) - cache_.local(m.child, model.parents(m.child));
    });
}

std::vector<Move> StructureSearch::forward_neighborhood(const Tgem& model) {
    const auto& caps = options_.caps;
    const auto n = model.label_count();
    auto room_for_interval = [&](LabelId child) {
        return !caps.max_intervals || model.interval_count(child) + 1 <= *caps.max_intervals;
    };
    std::vector<Move> moves;
    for (LabelId p = 0; p < n; ++p) {
        for (LabelId c = 0; c < n; ++c) {
            if (model.has_edge(p, c) || !horizons_.get(p, c)) {
                continue;
            }
            if (caps.max_indegree && model.in_degree(c) + 1 > *caps.max_indegree) {
                continue;
            }
            if (!room_for_interval(c)) {
                continue;
            }
            moves.push_back({MoveKind::add, p, c, 0, 0.0});
        }
    }
    const auto edges = model.edges();
    for (const auto& e : edges) {
        if (!room_for_interval(e.child)) {
            continue;
        }
        for (std::size_t i = 0; i < e.timescale.interval_count(); ++i) {
            moves.push_back({MoveKind::split, e.parent, e.child, i, 0.0});
        }
    }
    for (const auto& e : edges) {
        if (room_for_interval(e.child)) {
            moves.push_back({MoveKind::extend, e.parent, e.child, 0, 0.0});
        }
    }
    score(model, moves);
    return moves;
}

std::vector<Move> StructureSearch::backward_neighborhood(const Tgem& model) {
    std::vector<Move> moves;
    const auto edges = model.edges();
    for (const auto& e : edges) {
        if (e.timescale.interval_count() == 1) {
            moves.push_back({MoveKind::remove, e.parent, e.child, 0, 0.0});
        }
    }
    for (const auto& e : edges) {
        const auto& ts = e.timescale;
        for (std::size_t i = 0; i + 1 < ts.interval_count(); ++i) {
            if (ts.upper(i) == (ts.lower(i) + ts.upper(i + 1)) / 2.0) {
                moves.push_back({MoveKind::merge, e.parent, e.child, i, 0.0});
            }
        }
    }
    for (const auto& e : edges) {
        const auto& ts = e.timescale;
        const auto last = ts.interval_count() - 1;
        if (last > 0 && ts.upper(last) == 2.0 * ts.lower(last)) {
            moves.push_back({MoveKind::truncate, e.parent, e.child, 0, 0.0});
        }
    }
    score(model, moves);
    return moves;
}

SearchResult StructureSearch::run(Tgem model, SearchPhase phase) {
    if (model.labels() != stream_.vocabulary()) {
        throw std::invalid_argument("model and stream vocabularies differ");
    }
    SearchTrace trace;
    trace.initial_bic = cache_.bic(model);
    double current = trace.initial_bic;
    for (std::size_t iteration = 0;; ++iteration) {
        const auto moves = phase == SearchPhase::forward ? forward_neighborhood(model) : backward_neighborhood(model);
        const Move* best = nullptr;
        for (const auto& m : moves) {
            if (improves(m, best)) {
                best = &m;
            }
        }
        if (best == nullptr || !(best->score_delta > kScoreEpsilon)) {
            break;
        }
        if (iteration >= options_.max_iterations) {
            throw std::runtime_error("structure search exceeded " + std::to_string(options_.max_iterations) +
                                     " moves");
        }
        model = apply_move(model, *best, horizons_);
        const double after = cache_.bic(model);
        if (!(after > current)) {
            throw std::logic_error("accepted move did not increase BIC");
        }
        if (options_.verify_cache) {
            const double fresh = tgem::bic(stream_, model);
            if (std::abs(fresh - after) > 1e-9 * std::max(1.0, std::abs(fresh))) {
                throw std::logic_error("cached BIC diverged from fresh evaluation");
            }
        }
        current = after;
        trace.steps.push_back({phase, *best, after});
    }
    return {std::move(model), std::move(trace)};
}

SearchResult StructureSearch::forward(Tgem start) {
    return run(std::move(start), SearchPhase::forward);
}

SearchResult StructureSearch::backward(Tgem start) {
    return run(std::move(start), SearchPhase::backward);
}

LearnResult learn(const EventStream& stream, const HorizonPolicy& policy, const SearchOptions& options) {
    LearnResult result;
    result.horizons = default_horizons(stream, policy, options.jobs);
    StructureSearch search(stream, result.horizons, options);
    auto fwd = search.forward(Tgem(stream.vocabulary()));
    auto bwd = search.backward(std::move(fwd.model));
    result.empty_bic = fwd.trace.initial_bic;
    result.final_bic = bwd.trace.steps.empty() ? bwd.trace.initial_bic : bwd.trace.steps.back().bic_after;
    result.forward = std::move(fwd.trace);
    result.backward = std::move(bwd.trace);
    result.model = fit_rates(stream, std::move(bwd.model));
    return result;
}

std::string trace_to_json(const LearnResult& result) {
    using nlohmann::ordered_json;
    const auto& labels = result.model.labels();
    auto phase = [&](const SearchTrace& trace) {
        ordered_json steps = ordered_json::array();
        for (const auto& s : trace.steps) {
            ordered_json step;
            step["move"] = to_string(s.move.kind);
            step["from"] = labels.at(s.move.parent);
            step["to"] = labels.at(s.move.child);
            if (s.move.kind == MoveKind::split || s.move.kind == MoveKind::merge) {
                step["interval"] = s.move.interval;
            }
            step["score_delta"] = s.move.score_delta;
            step["bic_after"] = s.bic_after;
            steps.push_back(std::move(step));
        }
        return ordered_json{{"initial_bic", trace.initial_bic}, {"steps", std::move(steps)}};
    };
    ordered_json j;
    j["forward"] = phase(result.forward);
    j["backward"] = phase(result.backward);
    j["final_bic"] = result.final_bic;
    return j.dump(2) + "\n";
}

} // namespace tgem
