#include "rrg/perm_tower.hpp"

#include <stdexcept>
#include <string>

namespace rrg {

PermTower PermTower::from_successors(std::vector<Vertex> succ) {
    PermTower t;
    t.pred_.assign(succ.size(), 0);
    std::vector<bool> hit(succ.size(), false);
    for (Vertex v = 0; v < succ.size(); ++v) {
        const Vertex w = succ[v];
        if (w >= succ.size() || hit[w]) {
            throw std::invalid_argument("successor array is not a permutation");
        }
        hit[w] = true;
        t.pred_[w] = v;
    }
    t.succ_ = std::move(succ);
    return t;
}

PermTower PermTower::from_cycles(const Cycles& cycles) {
    std::size_t n = 0;
    for (const auto& c : cycles) {
        n += c.size();
    }
    std::vector<Vertex> succ(n, static_cast<Vertex>(n));
    for (const auto& c : cycles) {
        if (c.empty()) {
            throw std::invalid_argument("empty cycle");
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            const Vertex v = c[i];
            if (v >= n || succ[v] != n) {
                throw std::invalid_argument("cycles do not partition [0, n)");
            }
            succ[v] = c[(i + 1) % c.size()];
        }
    }
    return from_successors(std::move(succ));
}

void PermTower::insert(Vertex choice) {
    const auto n = static_cast<Vertex>(succ_.size());
    if (choice > n) {
        throw std::out_of_range("CRP choice " + std::to_string(choice) + " outside [0, " + std::to_string(n) + "]");
    }
    if (choice == n) {
        succ_.push_back(n);
        pred_.push_back(n);
        return;
    }
    const Vertex before = pred_[choice];
    succ_.push_back(choice);
    pred_.push_back(before);
    succ_[before] = n;
    pred_[choice] = n;
}

void PermTower::insert_uniform(Rng& rng) {
    insert(static_cast<Vertex>(uniform_index(rng, succ_.size() + 1)));
}

void PermTower::remove_last() {
    if (succ_.empty()) {
        throw std::logic_error("remove_last on an empty tower");
    }
    const auto last = static_cast<Vertex>(succ_.size() - 1);
    const Vertex before = pred_[last];
    const Vertex after = succ_[last];
    if (before != last) {
        succ_[before] = after;
        pred_[after] = before;
    }
    succ_.pop_back();
    pred_.pop_back();
}

Cycles PermTower::cycles() const {
    Cycles out;
    std::vector<bool> seen(succ_.size(), false);
    for (Vertex v = 0; v < succ_.size(); ++v) {
        if (seen[v]) {
            continue;
        }
        std::vector<Vertex> cyc;
        Vertex x = v;
        do {
            seen[x] = true;
            cyc.push_back(x);
            x = succ_[x];
        } while (x != v);
        out.push_back(std::move(cyc));
    }
    return out;
}

PermTower crp_step(PermTower tower, Vertex choice) {
    tower.insert(choice);
    return tower;
}

}  // namespace rrg
