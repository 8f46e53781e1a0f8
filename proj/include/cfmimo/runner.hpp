// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - link-level simulation toolkit for cell-free massive MIMO
// Copyright (C) 2026 The cfmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CFMIMO_RUNNER_HPP
#define CFMIMO_RUNNER_HPP

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "cfmimo/engines.hpp"

namespace cfmimo {

struct ResultTable {
    std::vector<ResultRow> rows;
};

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_string(const ResultTable& table) {
    std::size_t width = 0;
    for (const auto& r : table.rows) width = std::max(width, r.values.size());
    std::string out = "seed,scheme,metric,sum,min";
    for (std::size_t i = 0; i < width; ++i) out += ",v" + std::to_string(i);
    out += "\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.seed) + "," + r.scheme + "," + r.metric + "," +
               format_value(r.sum) + "," + format_value(r.min);
        for (std::size_t i = 0; i < width; ++i)
            out += "," + (i < r.values.size() ? format_value(r.values[i]) : std::string());
        out += "\n";
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_argument_error("cannot open output file '" + path + "'");
    out << content;
}

// Runs all seeds on a small worker pool. Each seed's rows land in a fixed
// slot, so the assembled table is identical for any worker count. Completed
// prefixes are flushed to disk every flush_every seeds when a path is given.
inline ResultTable run_experiment(const ExperimentConfig& cfg, const std::string& flush_path = "",
                                  int flush_every = 10, bool progress = false) {
    cfg.validate();
    const int S = cfg.seeds;
    std::vector<std::vector<ResultRow>> slots(S);
    std::vector<char> done(S, 0);
    std::atomic<int> next{0};
    std::mutex io_mutex;
    int flushed_prefix = 0;

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= S) return;
            auto rows = run_seed(cfg, i);
            std::lock_guard<std::mutex> lock(io_mutex);
            slots[i] = std::move(rows);
            done[i] = 1;
            if (progress) std::fprintf(stderr, "seed %d/%d done\n", i + 1, S);
            if (!flush_path.empty()) {
                int prefix = flushed_prefix;
                while (prefix < S && done[prefix]) ++prefix;
                if (prefix - flushed_prefix >= flush_every || prefix == S) {
                    ResultTable partial;
                    for (int j = 0; j < prefix; ++j)
                        partial.rows.insert(partial.rows.end(), slots[j].begin(), slots[j].end());
                    write_file(flush_path, csv_string(partial));
                    flushed_prefix = prefix;
                }
            }
        }
    };

    const int W = std::max(1, std::min(cfg.workers, S));
    std::vector<std::thread> pool;
    for (int w = 0; w < W; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    ResultTable table;
    for (auto& s : slots) table.rows.insert(table.rows.end(), s.begin(), s.end());
    return table;
}

// Gather samples for a metric: plain name takes every per-UE value,
// "<name>.sum" / "<name>.min" take the row aggregates.
inline std::vector<double> collect_metric(const ResultTable& table, const std::string& metric) {
    std::string base = metric;
    int agg = 0;  // 0 = values, 1 = sum, 2 = min
    if (base.size() > 4 && base.substr(base.size() - 4) == ".sum") {
        agg = 1;
        base = base.substr(0, base.size() - 4);
    } else if (base.size() > 4 && base.substr(base.size() - 4) == ".min") {
        agg = 2;
        base = base.substr(0, base.size() - 4);
    }
    std::vector<double> out;
    for (const auto& r : table.rows) {
        if (r.metric != base) continue;
        if (agg == 1) out.push_back(r.sum);
        else if (agg == 2) out.push_back(r.min);
        else out.insert(out.end(), r.values.begin(), r.values.end());
    }
    return out;
}

// two-column empirical CDF: value and P(X <= value), nondecreasing
inline std::string cdf_string(const ResultTable& table, const std::string& metric) {
    std::vector<double> v = collect_metric(table, metric);
    if (v.empty()) throw invalid_argument_error("emit_cdf: no samples for metric '" + metric + "'");
    std::sort(v.begin(), v.end());
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += format_value(v[i]) + " " + format_value(double(i + 1) / v.size()) + "\n";
    return out;
}

inline void emit_cdf(const ResultTable& table, const std::string& metric,
                     const std::string& path) {
    write_file(path, cdf_string(table, metric));
}

}  // namespace cfmimo

#endif
