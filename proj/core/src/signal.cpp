#include "conecert/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conecert {

void SwitchingSignal::validate() const {
    if (edges.size() < 2) throw std::invalid_argument("signal needs at least one interval");
    if (index.size() + 1 != edges.size()) {
        throw std::invalid_argument("signal payload count must equal interval count");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) {
            throw std::invalid_argument("signal breakpoints must be strictly increasing");
        }
        if (dwell_time > 0.0 && edges[i] - edges[i - 1] < dwell_time * (1.0 - 1e-12)) {
            throw std::invalid_argument("signal interval shorter than the declared dwell time");
        }
    }
    for (const int ix : index) {
        if (ix < 0 || (!library.empty() && ix >= static_cast<int>(library.size()))) {
            throw std::invalid_argument("signal payload index out of range");
        }
    }
}

int SwitchingSignal::interval_at(double t) const {
    if (t <= edges.front()) return 0;
    if (t >= edges.back()) return intervals() - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), t);
    return static_cast<int>(it - edges.begin()) - 1;
}

const WeightedDigraph& SwitchingSignal::graph_at(double t) const {
    if (library.empty()) throw std::logic_error("signal carries no graph payloads");
    return library[static_cast<std::size_t>(index_at(t))];
}

std::vector<GraphSample> SwitchingSignal::graph_samples() const {
    if (library.empty()) throw std::logic_error("signal carries no graph payloads");
    std::vector<GraphSample> out;
    out.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        out.push_back({edges[i], library[static_cast<std::size_t>(index[i])]});
    }
    return out;
}

std::vector<double> SwitchingSignal::breakpoints() const {
    if (edges.size() <= 2) return {};
    return {edges.begin() + 1, edges.end() - 1};
}

SwitchingSignal SwitchingSignal::constant(WeightedDigraph g, double t_begin) {
    SwitchingSignal s;
    s.edges = {t_begin, t_begin + 1.0};
    s.index = {0};
    s.library.push_back(std::move(g));
    return s;
}

CheckpointSequence CheckpointSequence::uniform(double t0, double t_end, double spacing) {
    if (!(spacing > 0.0) || !(t_end > t0)) {
        throw std::invalid_argument("checkpoints: need positive spacing and t_end > t0");
    }
    CheckpointSequence seq;
    const auto count = static_cast<long>(std::floor((t_end - t0) / spacing + 1e-9));
    seq.times.reserve(count + 1);
    for (long k = 0; k <= count; ++k) seq.times.push_back(t0 + spacing * static_cast<double>(k));
    seq.sup_gap = spacing;
    return seq;
}

void CheckpointSequence::validate() const {
    if (times.size() < 2) throw std::invalid_argument("checkpoints: need at least one interval");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("checkpoints must be strictly increasing");
        }
    }
}

} // namespace conecert
