#pragma once
// Phase-space points, derivative multi-indices, and the query tape.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <vector>

#include "hamadv/errors.hpp"

namespace hamadv {

/// Bit-level equality. Replay and agreement checks in this project compare
/// doubles for identity, not closeness.
inline bool bits_equal(double a, double b) {
    std::uint64_t ua, ub;
    std::memcpy(&ua, &a, sizeof ua);
    std::memcpy(&ub, &b, sizeof ub);
    return ua == ub;
}

/// A point (q, p) in 2n-dimensional phase space. q and p always have equal
/// length n >= 1 with finite components.
struct PhasePoint {
    std::vector<double> q;
    std::vector<double> p;

    static PhasePoint planar(double q0, double p0) { return PhasePoint{{q0}, {p0}}; }

    int dim() const { return static_cast<int>(q.size()); }
    bool is_planar() const { return dim() == 1; }

    bool all_finite() const {
        for (double v : q)
            if (!std::isfinite(v)) return false;
        for (double v : p)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void validate(const PhasePoint& x) {
    if (x.q.empty() || x.q.size() != x.p.size())
        raise(Errc::dimension_mismatch,
              "phase point needs equal q/p lengths >= 1, got q=" + std::to_string(x.q.size()) +
                  " p=" + std::to_string(x.p.size()));
    if (!x.all_finite()) raise(Errc::validation_error, "phase point has non-finite components");
}

inline bool bits_equal(const PhasePoint& a, const PhasePoint& b) {
    if (a.q.size() != b.q.size() || a.p.size() != b.p.size()) return false;
    for (std::size_t i = 0; i < a.q.size(); ++i)
        if (!bits_equal(a.q[i], b.q[i])) return false;
    for (std::size_t i = 0; i < a.p.size(); ++i)
        if (!bits_equal(a.p[i], b.p[i])) return false;
    return true;
}

inline double distance(const PhasePoint& a, const PhasePoint& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        const double d = a.q[i] - b.q[i];
        s += d * d;
    }
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        const double d = a.p[i] - b.p[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double max_abs_diff(const PhasePoint& a, const PhasePoint& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) m = std::max(m, std::fabs(a.q[i] - b.q[i]));
    for (std::size_t i = 0; i < a.p.size(); ++i) m = std::max(m, std::fabs(a.p[i] - b.p[i]));
    return m;
}

/// Multi-index of partial-derivative orders, length 2n, in variable order
/// (q1..qn, p1..pn).
struct MultiIndex {
    std::vector<int> alpha;

    static MultiIndex planar(int dq, int dp) { return MultiIndex{{dq, dp}}; }

    static MultiIndex value(int n) { return MultiIndex{std::vector<int>(2 * n, 0)}; }

    static MultiIndex partial_q(int n, int i) {
        MultiIndex a = value(n);
        a.alpha[i] = 1;
        return a;
    }

    static MultiIndex partial_p(int n, int i) {
        MultiIndex a = value(n);
        a.alpha[n + i] = 1;
        return a;
    }

    int order() const { return std::accumulate(alpha.begin(), alpha.end(), 0); }
    int dim() const { return static_cast<int>(alpha.size()) / 2; }
};

/// One recorded Hamiltonian-derivative query: where, which derivative, and
/// the exact value returned.
struct QueryRecord {
    PhasePoint point;
    MultiIndex alpha;
    double value;
};

/// Ordered, append-only record of every derivative query made during one
/// integrator step. Single-writer: exactly one step owns a tape at a time.
class QueryTape {
public:
    void append(PhasePoint point, MultiIndex alpha, double value) {
        records_.push_back(QueryRecord{std::move(point), std::move(alpha), value});
    }

    const std::vector<QueryRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const QueryRecord& operator[](std::size_t i) const { return records_[i]; }

    /// Every q-coordinate appearing in any record, in record order.
    std::vector<double> q_coordinates() const {
        std::vector<double> qs;
        qs.reserve(records_.size());
        for (const QueryRecord& r : records_)
            for (double v : r.point.q) qs.push_back(v);
        return qs;
    }

private:
    std::vector<QueryRecord> records_;
};

} // namespace hamadv
