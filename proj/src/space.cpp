#include "svi/space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace svi {

SpaceModel SpaceModel::dyadic(int maxDepth) {
    if (maxDepth < 0 || maxDepth > 62)
        throw std::invalid_argument("space: dyadic maxDepth out of range");
    SpaceModel s;
    s.kind = SpaceKind::DyadicUnitInterval;
    s.maxDepth = maxDepth;
    return s;
}

SpaceModel SpaceModel::finite(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("space: finite size out of range");
    SpaceModel s;
    s.kind = SpaceKind::FiniteSpace;
    s.points = n;
    return s;
}

std::string SpaceModel::describe() const {
    if (isDyadic()) return "dyadic(" + std::to_string(maxDepth) + ")";
    return "finite(" + std::to_string(points) + ")";
}

std::uint64_t tickOf(const SpaceModel& s, double t) {
    if (!s.isDyadic()) throw std::invalid_argument("tickOf: dyadic model only");
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("tickOf: point outside [0,1]");
    double scaled = t * static_cast<double>(s.ticks());
    auto tick = static_cast<std::uint64_t>(scaled);
    if (tick >= s.ticks()) tick = s.ticks() - 1; // the point 1 lives in the last cell
    return tick;
}

static void requireSame(const SpaceModel& a, const SpaceModel& b) {
    if (!(a == b)) throw std::invalid_argument("measurable set: space mismatch");
}

static std::vector<MeasurableSet::Run> canonicalize(std::vector<MeasurableSet::Run> runs) {
    std::erase_if(runs, [](const auto& r) { return r.first >= r.second; });
    std::sort(runs.begin(), runs.end());
    std::vector<MeasurableSet::Run> out;
    for (const auto& r : runs) {
        if (!out.empty() && r.first <= out.back().second)
            out.back().second = std::max(out.back().second, r.second);
        else
            out.push_back(r);
    }
    return out;
}

MeasurableSet MeasurableSet::empty(const SpaceModel& s) {
    MeasurableSet m;
    m.space_ = s;
    return m;
}

MeasurableSet MeasurableSet::full(const SpaceModel& s) {
    MeasurableSet m;
    m.space_ = s;
    if (s.isDyadic())
        m.runs_ = {{0, s.ticks()}};
    else
        m.mask_ = (s.points == 64) ? ~0ull : ((1ull << s.points) - 1);
    return m;
}

MeasurableSet MeasurableSet::cell(const SpaceModel& s, int depth, std::uint64_t index) {
    if (!s.isDyadic()) throw std::invalid_argument("cell: dyadic model only");
    if (depth < 0 || depth > s.maxDepth) throw std::invalid_argument("cell: depth out of range");
    if (index >= (1ull << depth)) throw std::invalid_argument("cell: index out of range");
    std::uint64_t width = s.ticks() >> depth;
    MeasurableSet m;
    m.space_ = s;
    m.runs_ = {{index * width, (index + 1) * width}};
    return m;
}

MeasurableSet MeasurableSet::fromRuns(const SpaceModel& s, std::vector<Run> runs) {
    if (!s.isDyadic()) throw std::invalid_argument("fromRuns: dyadic model only");
    for (const auto& r : runs)
        if (r.second > s.ticks()) throw std::invalid_argument("fromRuns: run exceeds space");
    MeasurableSet m;
    m.space_ = s;
    m.runs_ = canonicalize(std::move(runs));
    return m;
}

MeasurableSet MeasurableSet::fromMask(const SpaceModel& s, std::uint64_t mask) {
    if (!s.isFinite()) throw std::invalid_argument("fromMask: finite model only");
    std::uint64_t fullMask = (s.points == 64) ? ~0ull : ((1ull << s.points) - 1);
    if (mask & ~fullMask) throw std::invalid_argument("fromMask: bits outside space");
    MeasurableSet m;
    m.space_ = s;
    m.mask_ = mask;
    return m;
}

MeasurableSet MeasurableSet::cellAtRational(const SpaceModel& s, int depth, std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0 || num > den) throw std::invalid_argument("cellAtRational: need 0 <= num/den <= 1");
    // index = floor(num * 2^depth / den), clamped so the point 1 stays inside
    unsigned __int128 scaled = static_cast<unsigned __int128>(num) << depth;
    auto index = static_cast<std::uint64_t>(scaled / static_cast<unsigned __int128>(den));
    if (index >= (1ull << depth)) index = (1ull << depth) - 1;
    return cell(s, depth, index);
}

MeasurableSet MeasurableSet::cellAtPoint(const SpaceModel& s, int depth, double t) {
    if (depth < 0 || depth > s.maxDepth) throw std::invalid_argument("cellAtPoint: depth out of range");
    std::uint64_t tick = tickOf(s, t);
    return cell(s, depth, tick >> (s.maxDepth - depth));
}

bool MeasurableSet::isEmpty() const {
    return space_.isDyadic() ? runs_.empty() : mask_ == 0;
}

bool MeasurableSet::operator==(const MeasurableSet& o) const {
    return space_ == o.space_ && runs_ == o.runs_ && mask_ == o.mask_;
}

MeasurableSet MeasurableSet::unionWith(const MeasurableSet& o) const {
    requireSame(space_, o.space_);
    if (space_.isFinite()) return fromMask(space_, mask_ | o.mask_);
    std::vector<Run> runs = runs_;
    runs.insert(runs.end(), o.runs_.begin(), o.runs_.end());
    MeasurableSet m;
    m.space_ = space_;
    m.runs_ = canonicalize(std::move(runs));
    return m;
}

MeasurableSet MeasurableSet::intersectWith(const MeasurableSet& o) const {
    requireSame(space_, o.space_);
    if (space_.isFinite()) return fromMask(space_, mask_ & o.mask_);
    MeasurableSet m;
    m.space_ = space_;
    std::size_t i = 0, j = 0;
    while (i < runs_.size() && j < o.runs_.size()) {
        std::uint64_t lo = std::max(runs_[i].first, o.runs_[j].first);
        std::uint64_t hi = std::min(runs_[i].second, o.runs_[j].second);
        if (lo < hi) m.runs_.push_back({lo, hi});
        if (runs_[i].second < o.runs_[j].second)
            ++i;
        else
            ++j;
    }
    return m;
}

MeasurableSet MeasurableSet::differenceWith(const MeasurableSet& o) const {
    requireSame(space_, o.space_);
    if (space_.isFinite()) return fromMask(space_, mask_ & ~o.mask_);
    MeasurableSet m;
    m.space_ = space_;
    std::size_t j = 0;
    for (const auto& r : runs_) {
        std::uint64_t cur = r.first;
        while (j < o.runs_.size() && o.runs_[j].second <= cur) ++j;
        std::size_t k = j;
        while (cur < r.second) {
            if (k >= o.runs_.size() || o.runs_[k].first >= r.second) {
                m.runs_.push_back({cur, r.second});
                break;
            }
            if (o.runs_[k].first > cur) m.runs_.push_back({cur, o.runs_[k].first});
            cur = std::max(cur, o.runs_[k].second);
            ++k;
        }
    }
    m.runs_ = canonicalize(std::move(m.runs_));
    return m;
}

MeasurableSet MeasurableSet::complement() const {
    return full(space_).differenceWith(*this);
}

bool MeasurableSet::subsetOf(const MeasurableSet& o) const {
    return differenceWith(o).isEmpty();
}

bool MeasurableSet::disjointFrom(const MeasurableSet& o) const {
    return intersectWith(o).isEmpty();
}

bool MeasurableSet::containsPoint(double t) const {
    if (space_.isFinite()) {
        auto idx = static_cast<std::uint64_t>(t);
        return idx < static_cast<std::uint64_t>(space_.points) && (mask_ >> idx) & 1;
    }
    std::uint64_t tick = tickOf(space_, t);
    for (const auto& r : runs_)
        if (tick >= r.first && tick < r.second) return true;
    return false;
}

bool MeasurableSet::containsRational(std::int64_t num, std::int64_t den) const {
    if (!space_.isDyadic()) throw std::invalid_argument("containsRational: dyadic model only");
    if (den <= 0 || num < 0 || num > den) throw std::invalid_argument("containsRational: need 0 <= num/den <= 1");
    // tick run [a,b) contains num/den iff a*den <= num*2^D < b*den, with the
    // point 1 assigned to the last cell
    unsigned __int128 scaled = static_cast<unsigned __int128>(num) << space_.maxDepth;
    unsigned __int128 d = static_cast<unsigned __int128>(den);
    unsigned __int128 last = static_cast<unsigned __int128>(space_.ticks() - 1);
    if (scaled >= d * static_cast<unsigned __int128>(space_.ticks())) scaled = d * last; // num/den == 1
    for (const auto& r : runs_)
        if (static_cast<unsigned __int128>(r.first) * d <= scaled &&
            scaled < static_cast<unsigned __int128>(r.second) * d)
            return true;
    return false;
}

double MeasurableSet::lebesgue() const {
    if (!space_.isDyadic()) throw std::invalid_argument("lebesgue: dyadic model only");
    // tick counts are <= 2^maxDepth <= 2^53, so the quotient is exact
    return static_cast<double>(tickCount()) / static_cast<double>(space_.ticks());
}

std::uint64_t MeasurableSet::tickCount() const {
    std::uint64_t n = 0;
    for (const auto& r : runs_) n += r.second - r.first;
    return n;
}

std::vector<DyadicCell> MeasurableSet::cells() const {
    if (!space_.isDyadic()) throw std::invalid_argument("cells: dyadic model only");
    // greedy maximal decomposition: each run splits uniquely into the largest
    // aligned dyadic cells
    std::vector<DyadicCell> out;
    for (const auto& r : runs_) {
        std::uint64_t cur = r.first;
        while (cur < r.second) {
            std::uint64_t alignment = cur == 0 ? space_.ticks() : (cur & (~cur + 1));
            std::uint64_t width = std::min(alignment, std::bit_floor(r.second - cur));
            int depth = space_.maxDepth - std::countr_zero(width);
            out.push_back({depth, cur / width});
            cur += width;
        }
    }
    return out;
}

int MeasurableSet::elementCount() const {
    if (!space_.isFinite()) throw std::invalid_argument("elementCount: finite model only");
    return std::popcount(mask_);
}

void MeasurableSet::eachPiece(int depth, const std::function<void(MeasurableSet&&)>& fn) const {
    if (space_.isDyadic()) {
        if (depth < 0 || depth > space_.maxDepth) throw std::invalid_argument("pieces: depth out of range");
        // walk the runs once; all fragments falling in one chain cell are
        // consecutive, so pieces come out in position order
        int shift = space_.maxDepth - depth;
        std::vector<Run> cur;
        std::uint64_t curCell = ~0ull;
        auto flush = [&] {
            if (cur.empty()) return;
            MeasurableSet p;
            p.space_ = space_;
            p.runs_ = std::move(cur);
            cur = {};
            fn(std::move(p));
        };
        for (const auto& r : runs_) {
            std::uint64_t a = r.first;
            while (a < r.second) {
                std::uint64_t k = a >> shift;
                std::uint64_t b = std::min<std::uint64_t>(r.second, (k + 1) << shift);
                if (k != curCell) {
                    flush();
                    curCell = k;
                }
                cur.push_back({a, b});
                a = b;
            }
        }
        flush();
        return;
    }
    // finite model: nested block chain, singleton blocks once 2^depth >= n
    int levels = 0;
    while ((1 << levels) < space_.points) ++levels;
    int shift = std::max(0, levels - depth);
    std::uint64_t blockSize = 1ull << shift;
    for (std::uint64_t start = 0; start < static_cast<std::uint64_t>(space_.points); start += blockSize) {
        std::uint64_t end = std::min(start + blockSize, static_cast<std::uint64_t>(space_.points));
        std::uint64_t blockMask = 0;
        for (std::uint64_t i = start; i < end; ++i) blockMask |= 1ull << i;
        std::uint64_t p = mask_ & blockMask;
        if (p) fn(fromMask(space_, p));
    }
}

std::vector<MeasurableSet> MeasurableSet::pieces(int depth) const {
    std::vector<MeasurableSet> out;
    eachPiece(depth, [&out](MeasurableSet&& p) { out.push_back(std::move(p)); });
    return out;
}

double MeasurableSet::repPoint() const {
    if (isEmpty()) throw std::invalid_argument("repPoint: empty set");
    if (space_.isFinite()) return static_cast<double>(std::countr_zero(mask_));
    const Run* best = &runs_[0];
    for (const auto& r : runs_)
        if (r.second - r.first > best->second - best->first) best = &r;
    double mid = (static_cast<double>(best->first) + static_cast<double>(best->second)) / 2.0;
    return mid / static_cast<double>(space_.ticks());
}

double MeasurableSet::samplePoint(Rng& rng) const {
    if (isEmpty()) throw std::invalid_argument("samplePoint: empty set");
    if (space_.isFinite()) {
        std::uint64_t k = rng.nextBelow(static_cast<std::uint64_t>(elementCount()));
        std::uint64_t m = mask_;
        while (k--) m &= m - 1;
        return static_cast<double>(std::countr_zero(m));
    }
    std::uint64_t pick = rng.nextBelow(tickCount());
    for (const auto& r : runs_) {
        std::uint64_t len = r.second - r.first;
        if (pick < len) {
            double tick = static_cast<double>(r.first + pick) + rng.nextDouble();
            return tick / static_cast<double>(space_.ticks());
        }
        pick -= len;
    }
    throw std::logic_error("samplePoint: unreachable");
}

std::uint64_t MeasurableSet::hashKey() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    mix(space_.isDyadic() ? 1 : 2);
    mix(mask_);
    for (const auto& r : runs_) {
        mix(r.first);
        mix(r.second);
    }
    return h;
}

std::string MeasurableSet::describe() const {
    if (space_.isFinite()) return "mask:" + std::to_string(mask_);
    std::string s = "{";
    for (const auto& c : cells()) {
        if (s.size() > 1) s += ",";
        s += "(" + std::to_string(c.depth) + "," + std::to_string(c.index) + ")";
    }
    return s + "}";
}

} // namespace svi
