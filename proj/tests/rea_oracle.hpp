#pragma once

// Independent reference for window localization. Scores are integer quarter
// units (0..4 for 0, 0.25, ..., 1.0) so every comparison is exact, and the
// recursion is driven by an explicit stack machine that executes the
// procedure one line at a time.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace vad::testing {

using Span = std::pair<std::size_t, std::size_t>;

struct OracleParams {
    int peak_q = 4;          // peak threshold, in quarters, rounded up from 0.8
    int mean_num = 1;        // mean threshold as a fraction: 1/2
    int mean_den = 2;
    std::size_t l_min = 2;
    std::size_t d_max = 8;
};

inline bool oracle_passes(const std::vector<int>& q, std::size_t l, std::size_t r,
                          const OracleParams& p) {
    int peak = 0, sum = 0;
    for (std::size_t i = l; i <= r; ++i) {
        peak = std::max(peak, q[i]);
        sum += q[i];
    }
    const int len = static_cast<int>(r - l + 1);
    // mean >= num/den  <=>  sum/4/len >= num/den  <=>  sum*den >= 4*len*num
    return peak >= p.peak_q || sum * p.mean_den >= 4 * len * p.mean_num;
}

// Merge: sort by start, fuse when the next start is at most gap+1 past the current end.
inline std::vector<Span> oracle_merge(std::vector<Span> xs, std::size_t gap) {
    std::sort(xs.begin(), xs.end());
    std::vector<Span> out;
    for (const auto& s : xs) {
        if (!out.empty() && static_cast<long>(s.first) - static_cast<long>(out.back().second) - 1 <=
                                static_cast<long>(gap)) {
            out.back().second = std::max(out.back().second, s.second);
        } else {
            out.push_back(s);
        }
    }
    return out;
}

inline std::vector<Span> oracle_localize(const std::vector<int>& q, const OracleParams& p) {
    struct Frame {
        long i0, i1;
        std::size_t d;
        int pc;  // 0: entry, 1: left done, 2: right done
        long im = 0;
        std::vector<Span> left;
    };
    std::vector<Frame> stack;
    std::vector<Span> ret;  // value returned by the most recently finished call
    stack.push_back({0, static_cast<long>(q.size()) - 1, 0, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.pc == 0) {
            if (f.i0 > f.i1) {
                ret.clear();
                stack.pop_back();
                continue;
            }
            if (!oracle_passes(q, f.i0, f.i1, p)) {
                ret.clear();
                stack.pop_back();
                continue;
            }
            if (f.d >= p.d_max || static_cast<std::size_t>(f.i1 - f.i0 + 1) <= p.l_min) {
                ret = {{static_cast<std::size_t>(f.i0), static_cast<std::size_t>(f.i1)}};
                stack.pop_back();
                continue;
            }
            f.im = (f.i0 + f.i1) / 2;
            f.pc = 1;
            Frame child{f.i0, f.im, f.d + 1, 0};
            stack.push_back(child);
        } else if (f.pc == 1) {
            f.left = ret;
            f.pc = 2;
            Frame child{f.im + 1, f.i1, f.d + 1, 0};
            stack.push_back(child);
        } else {
            std::vector<Span> all = f.left;
            all.insert(all.end(), ret.begin(), ret.end());
            ret = oracle_merge(all, 1);
            stack.pop_back();
        }
    }
    return ret;
}

}  // namespace vad::testing
