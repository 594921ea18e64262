// Copyright 2026 The rydqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rydqec/sampler.hpp"

#include <bit>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "rydqec/errors.hpp"

namespace rydqec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct SignatureHash {
    size_t operator()(const Signature &s) const {
        std::uint64_t h = s.logical ? 0x51ed27ULL : 0;
        for (auto w : s.words) {
            h = splitmix64(h ^ w);
        }
        return h;
    }
};

struct ChunkResult {
    std::uint64_t failures = 0;
    std::uint64_t greedy = 0;
};

ChunkResult run_range(const Sampler &sampler, const Decoder &decoder, std::uint64_t seed, std::uint64_t begin,
                      std::uint64_t end, std::unordered_map<Signature, std::pair<bool, bool>, SignatureHash> &cache) {
    ChunkResult r;
    for (std::uint64_t shot = begin; shot < end; ++shot) {
        Signature sig = sampler.sample_shot(seed, shot);
        const bool actual = sig.logical;
        sig.logical = false;
        bool prediction = false;
        bool greedy = false;
        if (!sig.empty()) {
            auto it = cache.find(sig);
            if (it == cache.end()) {
                const auto defects = decoder.defects_of(sig);
                if (!defects.empty()) {
                    const Correction c = decoder.decode(defects);
                    prediction = c.logical;
                    greedy = c.greedy;
                }
                cache.emplace(sig, std::make_pair(prediction, greedy));
            } else {
                std::tie(prediction, greedy) = it->second;
            }
        }
        r.failures += prediction != actual;
        r.greedy += greedy;
    }
    return r;
}

}  // namespace

std::uint64_t counter_random(std::uint64_t seed, std::uint64_t shot, std::uint64_t stream) {
    return splitmix64(splitmix64(splitmix64(seed) ^ shot) ^ (stream * 0xd1b54a32d192ed03ULL));
}

AliasTable::AliasTable(const std::vector<double> &probs) {
    const auto n = probs.size();
    require(n >= 2 && n <= 2048 && std::has_single_bit(n), "AliasTable: support size must be a power of two");
    double total = 0;
    for (double p : probs) {
        require(p >= 0 && std::isfinite(p), "AliasTable: probabilities must be finite and >= 0");
        total += p;
    }
    require(std::abs(total - 1.0) < 1e-9, "AliasTable: probabilities must sum to 1");
    shift_ = 64 - std::countr_zero(n);
    prob_.assign(n, 1.0);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<int> small, large;
    for (size_t i = 0; i < n; ++i) {
        scaled[i] = probs[i] / total * static_cast<double>(n);
        alias_[i] = static_cast<int>(i);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<int>(i));
    }
    while (!small.empty() && !large.empty()) {
        const int s = small.back();
        small.pop_back();
        const int l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (int i : small) {
        prob_[i] = 1.0;
    }
    for (int i : large) {
        prob_[i] = 1.0;
    }
}

int AliasTable::sample(std::uint64_t u) const {
    const auto column = static_cast<int>(u >> shift_);
    const double coin = static_cast<double>(u & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
    return coin < prob_[column] ? column : alias_[column];
}

Signature ShotBatch::row(std::uint64_t i) const {
    Signature s(n_detectors);
    for (int w = 0; w < words_per_shot; ++w) {
        s.words[w] = detectors[i * words_per_shot + w];
    }
    s.logical = observables[i] != 0;
    return s;
}

Sampler::Sampler(const FaultPropagator &propagator, const PauliChannel &cz_frame_channel)
    : propagator_(&propagator), table_((cz_frame_channel.validate(), cz_frame_channel.probs)) {
    require(cz_frame_channel.basis == StabilizerType::Z, "Sampler: channel must be in the CZ frame");
}

int Sampler::draw(std::uint64_t seed, std::uint64_t shot, int marker) const {
    return table_.sample(counter_random(seed, shot, static_cast<std::uint64_t>(marker)));
}

Signature Sampler::sample_shot(std::uint64_t seed, std::uint64_t shot) const {
    Signature sig(propagator_->n_detectors());
    for (int m = 0; m < propagator_->n_markers(); ++m) {
        const int q = draw(seed, shot, m);
        if (q != 0) {
            sig ^= propagator_->signature(m, PauliString::from_index(q));
        }
    }
    return sig;
}

ShotBatch Sampler::sample(std::uint64_t seed, std::uint64_t first_shot, std::uint64_t n_shots) const {
    require(n_shots >= 1, "sample: n_shots must be >= 1");
    ShotBatch b;
    b.seed = seed;
    b.first_shot = first_shot;
    b.n_shots = n_shots;
    b.n_detectors = propagator_->n_detectors();
    b.words_per_shot = (b.n_detectors + 63) / 64;
    b.detectors.resize(n_shots * b.words_per_shot);
    b.observables.resize(n_shots);
    for (std::uint64_t i = 0; i < n_shots; ++i) {
        const Signature s = sample_shot(seed, first_shot + i);
        for (int w = 0; w < b.words_per_shot; ++w) {
            b.detectors[i * b.words_per_shot + w] = s.words[w];
        }
        b.observables[i] = s.logical;
    }
    return b;
}

Signature Sampler::forced_fault(int marker, const PauliString &q) const {
    return propagator_->signature(marker, q);
}

Interval wilson_interval(std::uint64_t failures, std::uint64_t shots) {
    require(shots >= 1 && failures <= shots, "wilson_interval: need 0 <= failures <= shots, shots >= 1");
    const double n = static_cast<double>(shots);
    if (failures == 0) {
        return {0.0, 1.0 - std::pow(0.05, 1.0 / n)};
    }
    const double z = 1.959963984540054;
    const double p = static_cast<double>(failures) / n;
    const double denom = 1 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LogicalEstimate estimate(const ShotBatch &batch, const Decoder &decoder) {
    LogicalEstimate e;
    e.n_shots = batch.n_shots;
    for (std::uint64_t i = 0; i < batch.n_shots; ++i) {
        Signature s = batch.row(i);
        const bool actual = s.logical;
        s.logical = false;
        bool prediction = false;
        const auto defects = decoder.defects_of(s);
        if (!defects.empty()) {
            const Correction c = decoder.decode(defects);
            prediction = c.logical;
            e.greedy_decodes += c.greedy;
        }
        e.failures += prediction != actual;
    }
    e.p_L = static_cast<double>(e.failures) / static_cast<double>(e.n_shots);
    e.ci = wilson_interval(e.failures, e.n_shots);
    return e;
}

LogicalEstimate estimate_logical(const Sampler &sampler, const Decoder &decoder, std::uint64_t seed,
                                 const ShotPolicy &policy, int workers) {
    require(policy.max_shots >= 1 && policy.chunk >= 1, "estimate_logical: invalid shot policy");
    require(workers >= 1, "estimate_logical: workers must be >= 1");
    std::vector<std::unordered_map<Signature, std::pair<bool, bool>, SignatureHash>> caches(workers);
    LogicalEstimate e;
    while (e.n_shots < policy.max_shots) {
        const std::uint64_t begin = e.n_shots;
        const std::uint64_t end = std::min(policy.max_shots, begin + policy.chunk);
        std::vector<ChunkResult> parts(workers);
        if (workers == 1) {
            parts[0] = run_range(sampler, decoder, seed, begin, end, caches[0]);
        } else {
            std::vector<std::thread> threads;
            const std::uint64_t span = end - begin;
            for (int w = 0; w < workers; ++w) {
                const std::uint64_t lo = begin + span * w / workers;
                const std::uint64_t hi = begin + span * (w + 1) / workers;
                threads.emplace_back([&, w, lo, hi] { parts[w] = run_range(sampler, decoder, seed, lo, hi, caches[w]); });
            }
            for (auto &t : threads) {
                t.join();
            }
        }
        for (const auto &p : parts) {
            e.failures += p.failures;
            e.greedy_decodes += p.greedy;
        }
        e.n_shots = end;
        if (e.failures >= policy.min_failures) {
            const auto ci = wilson_interval(e.failures, e.n_shots);
            const double p = static_cast<double>(e.failures) / static_cast<double>(e.n_shots);
            if (0.5 * (ci.hi - ci.lo) < policy.target_rel_halfwidth * p) {
                break;
            }
        }
    }
    e.p_L = static_cast<double>(e.failures) / static_cast<double>(e.n_shots);
    e.ci = wilson_interval(e.failures, e.n_shots);
    return e;
}

}  // namespace rydqec
