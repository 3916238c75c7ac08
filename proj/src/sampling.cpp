#include "tgem/sampling.hpp"

#include "tgem/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tgem {

namespace {

struct Tarjan {
    const std::vector<std::vector<LabelId>>& successors;
    std::vector<int> index;
    std::vector<int> low;
    std::vector<bool> on_stack;
    std::vector<LabelId> stack;
    std::vector<std::vector<LabelId>> components;
    int counter = 0;

    explicit Tarjan(const std::vector<std::vector<LabelId>>& succ)
        : successors(succ), index(succ.size(), -1), low(succ.size(), 0), on_stack(succ.size(), false) {}

    void visit(LabelId v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (LabelId w : successors[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<LabelId> component;
            LabelId w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                component.push_back(w);
            } while (w != v);
            std::sort(component.begin(), component.end());
            components.push_back(std::move(component));
        }
    }
};

} // namespace

Condensation condensation(const Tgem& model) {
    const auto n = model.label_count();
    std::vector<std::vector<LabelId>> successors(n);
    for (const auto& e : model.edges()) {
        successors[e.parent].push_back(e.child);
    }
    Tarjan tarjan(successors);
    for (LabelId v = 0; v < n; ++v) {
        if (tarjan.index[v] < 0) {
            tarjan.visit(v);
        }
    }

    Condensation out;
    out.components = std::move(tarjan.components);
    std::sort(out.components.begin(), out.components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<std::size_t> component_of(n);
    for (std::size_t c = 0; c < out.components.size(); ++c) {
        for (LabelId v : out.components[c]) {
            component_of[v] = c;
        }
    }
    const auto m = out.components.size();
    out.cyclic.assign(m, false);
    std::vector<std::vector<std::size_t>> dag(m);
    std::vector<std::size_t> indegree(m, 0);
    for (const auto& e : model.edges()) {
        const auto from = component_of[e.parent];
        const auto to = component_of[e.child];
        if (from == to) {
            out.cyclic[from] = true;
        } else {
            dag[from].push_back(to);
            ++indegree[to];
        }
    }
    // Components are sorted by smallest member, so the smallest index is the tie-break.
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t c = 0; c < m; ++c) {
        if (indegree[c] == 0) {
            ready.push(c);
        }
    }
    while (!ready.empty()) {
        const auto c = ready.top();
        ready.pop();
        out.order.push_back(c);
        for (auto next : dag[c]) {
            if (--indegree[next] == 0) {
                ready.push(next);
            }
        }
    }
    return out;
}

EventStream sample(const Tgem& model, double t_end, std::uint64_t seed) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("t_end must be positive and finite");
    }
    if (const auto problems = validate_model(model); !problems.empty()) {
        throw std::invalid_argument("cannot sample from invalid model: " + problems.front());
    }
    const auto n = model.label_count();
    const auto cond = condensation(model);
    std::vector<std::vector<double>> times(n);

    // children[z]: edges leaving z, as (child, timescale).
    std::vector<std::vector<std::pair<LabelId, const Timescale*>>> children(n);
    for (LabelId c = 0; c < n; ++c) {
        for (const auto& pe : model.parents(c)) {
            children[pe.parent].emplace_back(c, &pe.timescale);
        }
    }

    for (std::size_t k = 0; k < cond.order.size(); ++k) {
        const auto& members = cond.components[cond.order[k]];
        Rng rng(derive_seed(seed, k));
        std::vector<bool> is_member(n, false);
        for (LabelId m : members) {
            is_member[m] = true;
        }

        std::priority_queue<double, std::vector<double>, std::greater<>> changes;
        auto push_offsets = [&](double tz, const Timescale& ts) {
            if (tz < t_end) {
                changes.push(tz);
            }
            for (double a : ts.endpoints) {
                if (tz + a >= t_end) {
                    break;
                }
                changes.push(tz + a);
            }
        };
        for (LabelId m : members) {
            for (const auto& pe : model.parents(m)) {
                if (!is_member[pe.parent]) {
                    for (double tz : times[pe.parent]) {
                        push_offsets(tz, pe.timescale);
                    }
                }
            }
        }

        double t = 0.0;
        while (true) {
            while (!changes.empty() && changes.top() <= t) {
                changes.pop();
            }
            const double next = changes.empty() ? t_end : std::min(changes.top(), t_end);
            double earliest = std::numeric_limits<double>::infinity();
            LabelId winner = 0;
            for (LabelId m : members) {
                const double rate = model.rates(m)[config_at(model.parents(m), times, next)];
                const double candidate = t + rng.exponential(rate);
                if (candidate < earliest) {
                    earliest = candidate;
                    winner = m;
                }
            }
            if (earliest <= next && earliest < t_end) {
                times[winner].push_back(earliest);
                for (const auto& [child, ts] : children[winner]) {
                    if (is_member[child]) {
                        push_offsets(earliest, *ts);
                    }
                }
                t = earliest;
            } else if (next >= t_end) {
                break;
            } else {
                t = next;
            }
        }
    }

    std::vector<TimedEvent> events;
    for (LabelId l = 0; l < n; ++l) {
        for (double t : times[l]) {
            events.push_back({t, l});
        }
    }
    std::sort(events.begin(), events.end(), [](const TimedEvent& a, const TimedEvent& b) { return a.time < b.time; });
    return EventStream(model.labels(), std::move(events), t_end);
}

} // namespace tgem
