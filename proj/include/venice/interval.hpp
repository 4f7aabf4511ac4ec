#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "venice/common.hpp"

namespace venice {

// Interval on the line with open/closed endpoint flags.
// Invariant after normalization: lo <= hi; if lo == hi both endpoints closed
// (a point) or the interval is empty.
struct Interval {
    double lo = 0.0, hi = 0.0;
    bool lo_open = false, hi_open = false;

    static Interval closed(double a, double b) { return {a, b, false, false}; }
    static Interval open(double a, double b) { return {a, b, true, true}; }
    static Interval lopen(double a, double b) { return {a, b, true, false}; }   // (a, b]
    static Interval ropen(double a, double b) { return {a, b, false, true}; }   // [a, b)
    static Interval point(double a) { return {a, a, false, false}; }

    double length() const { return hi - lo; }

    bool empty() const {
        if (lo > hi) return true;
        if (lo == hi) return lo_open || hi_open;
        return false;
    }

    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && lo_open) return false;
        if (x == hi && hi_open) return false;
        return true;
    }

    // Closed-hull distance from a point; 0 for points inside.
    double dist(double x) const {
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0.0;
    }

    Interval intersect(const Interval& o) const {
        Interval r;
        if (lo > o.lo) { r.lo = lo; r.lo_open = lo_open; }
        else if (lo < o.lo) { r.lo = o.lo; r.lo_open = o.lo_open; }
        else { r.lo = lo; r.lo_open = lo_open || o.lo_open; }
        if (hi < o.hi) { r.hi = hi; r.hi_open = hi_open; }
        else if (hi > o.hi) { r.hi = o.hi; r.hi_open = o.hi_open; }
        else { r.hi = hi; r.hi_open = hi_open || o.hi_open; }
        return r;
    }
};

// Sorted disjoint union of intervals. Merging treats shared endpoints with at
// least one closed flag as connected.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(Interval i) { add(i); }

    void add(const Interval& i) {
        if (!i.empty()) parts_.push_back(i);
        dirty_ = true;
    }

    void add(const IntervalSet& s) {
        for (const auto& i : s.parts_) parts_.push_back(i);
        dirty_ = true;
    }

    const std::vector<Interval>& parts() const {
        normalize();
        return parts_;
    }

    bool empty() const {
        normalize();
        return parts_.empty();
    }

    bool contains(double x) const {
        normalize();
        for (const auto& p : parts_)
            if (p.contains(x)) return true;
        return false;
    }

    // Total length of [a,b] not covered by the closure of this set.
    double uncovered_length(double a, double b) const {
        normalize();
        double gap = 0.0, cursor = a;
        for (const auto& p : parts_) {
            if (p.hi < a || p.lo > b) continue;
            if (p.lo > cursor) gap += p.lo - cursor;
            cursor = std::max(cursor, p.hi);
            if (cursor >= b) break;
        }
        if (cursor < b) gap += b - cursor;
        return gap;
    }

    // Exact set equality up to tol on endpoints (flags must match).
    bool same_as(const IntervalSet& o, double tol) const {
        normalize();
        o.normalize();
        if (parts_.size() != o.parts_.size()) return false;
        for (size_t k = 0; k < parts_.size(); ++k) {
            const auto& p = parts_[k];
            const auto& q = o.parts_[k];
            if (!approx_eq(p.lo, q.lo, tol) || !approx_eq(p.hi, q.hi, tol)) return false;
            if (p.lo_open != q.lo_open || p.hi_open != q.hi_open) return false;
        }
        return true;
    }

    double min_dist(double x) const {
        normalize();
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : parts_) d = std::min(d, p.dist(x));
        return d;
    }

    size_t count() const {
        normalize();
        return parts_.size();
    }

private:
    void normalize() const {
        if (!dirty_) return;
        dirty_ = false;
        auto& v = parts_;
        v.erase(std::remove_if(v.begin(), v.end(), [](const Interval& i) { return i.empty(); }),
                v.end());
        std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
            if (a.lo != b.lo) return a.lo < b.lo;
            return a.hi < b.hi;
        });
        std::vector<Interval> out;
        for (const auto& i : v) {
            if (!out.empty()) {
                Interval& last = out.back();
                bool touch = i.lo < last.hi ||
                             (i.lo == last.hi && (!i.lo_open || !last.hi_open));
                if (touch) {
                    if (i.hi > last.hi) { last.hi = i.hi; last.hi_open = i.hi_open; }
                    else if (i.hi == last.hi) last.hi_open = last.hi_open && i.hi_open;
                    if (i.lo == last.lo) last.lo_open = last.lo_open && i.lo_open;
                    continue;
                }
            }
            out.push_back(i);
        }
        v.swap(out);
    }

    mutable std::vector<Interval> parts_;
    mutable bool dirty_ = false;
};

}  // namespace venice
