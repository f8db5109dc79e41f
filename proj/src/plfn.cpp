#include "plfn.hpp"

#include <algorithm>

namespace md {

PLFn::PLFn(Rat start, Rat value, Rat slope) : slope_(std::move(slope)) {
  pts_.emplace_back(std::move(start), std::move(value));
}

PLFn PLFn::from_points(std::vector<std::pair<Rat, Rat>> pts, Rat final_slope) {
  if (pts.empty()) throw Error("PLFn needs at least one point");
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first <= pts[i - 1].first)
      throw Error("PLFn points must strictly increase in time");
  PLFn f;
  f.pts_ = std::move(pts);
  f.slope_ = std::move(final_slope);
  f.normalize();
  return f;
}

Rat PLFn::eval(const Rat& t) const {
  if (t < start()) throw Error("PLFn evaluated before its start");
  size_t i = pts_.size() - 1;
  while (i > 0 && pts_[i].first > t) --i;
  if (i + 1 < pts_.size()) {
    const auto& [t0, v0] = pts_[i];
    const auto& [t1, v1] = pts_[i + 1];
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }
  return pts_[i].second + slope_ * (t - pts_[i].first);
}

void PLFn::normalize() {
  // Drop interior points that lie on the segment through their neighbours.
  std::vector<std::pair<Rat, Rat>> out;
  out.reserve(pts_.size());
  auto slope_after = [&](size_t i) -> Rat {
    if (i + 1 == pts_.size()) return slope_;
    return (pts_[i + 1].second - pts_[i].second) /
           (pts_[i + 1].first - pts_[i].first);
  };
  for (size_t i = 0; i < pts_.size(); ++i) {
    if (!out.empty() && i > 0) {
      Rat prev_slope =
          (pts_[i].second - out.back().second) / (pts_[i].first - out.back().first);
      if (prev_slope == slope_after(i)) continue;
    }
    out.push_back(pts_[i]);
  }
  pts_ = std::move(out);
}

PLFn merge_binary(const PLFn& a, const PLFn& b, bool take_max) {
  if (a.start() != b.start())
    throw Error("PLFn operands must share a start time");
  // Merge breakpoint times.
  std::vector<Rat> times;
  for (const auto& p : a.pts_) times.push_back(p.first);
  for (const auto& p : b.pts_) times.push_back(p.first);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  PLFn r;
  if (take_max) {
    // Insert intersection points where a-b changes sign inside a segment.
    std::vector<Rat> extra;
    for (size_t i = 0; i + 1 < times.size(); ++i) {
      Rat d0 = a.eval(times[i]) - b.eval(times[i]);
      Rat d1 = a.eval(times[i + 1]) - b.eval(times[i + 1]);
      if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
        // Linear interpolation of the sign change.
        Rat t = times[i] + (times[i + 1] - times[i]) * (-d0) / (d1 - d0);
        extra.push_back(t);
      }
    }
    // Tail: slopes may cross after the last breakpoint.
    {
      const Rat& t_last = times.back();
      Rat d = a.eval(t_last) - b.eval(t_last);
      Rat ds = a.final_slope() - b.final_slope();
      if (d != 0 && ds != 0 && ((d < 0) != (ds < 0))) {
        Rat t = t_last + (-d) / ds;
        if (t > t_last) extra.push_back(t);
      }
    }
    times.insert(times.end(), extra.begin(), extra.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
  }

  for (const Rat& t : times) {
    Rat va = a.eval(t), vb = b.eval(t);
    r.pts_.emplace_back(t, take_max ? rat_max(va, vb) : va + vb);
  }
  if (take_max) {
    Rat d = a.eval(times.back()) - b.eval(times.back());
    if (d > 0)
      r.slope_ = a.final_slope();
    else if (d < 0)
      r.slope_ = b.final_slope();
    else
      r.slope_ = rat_max(a.final_slope(), b.final_slope());
  } else {
    r.slope_ = a.final_slope() + b.final_slope();
  }
  r.normalize();
  return r;
}

PLFn PLFn::operator+(const PLFn& o) const { return merge_binary(*this, o, false); }

PLFn PLFn::operator-(const Rat& c) const {
  PLFn r = *this;
  for (auto& p : r.pts_) p.second -= c;
  return r;
}

PLFn PLFn::max(const PLFn& a, const PLFn& b) { return merge_binary(a, b, true); }

MaybeTime PLFn::crossing(const Rat& target) const {
  for (size_t i = 0; i < pts_.size(); ++i) {
    const auto& [t0, v0] = pts_[i];
    if (v0 >= target) return t0;
    if (i + 1 < pts_.size()) {
      const auto& [t1, v1] = pts_[i + 1];
      if (v1 >= target) {
        // v0 < target <= v1 on a linear segment.
        return t0 + (t1 - t0) * (target - v0) / (v1 - v0);
      }
    } else {
      if (slope_ <= 0) return std::nullopt;
      return t0 + (target - v0) / slope_;
    }
  }
  return std::nullopt;
}

bool PLFn::non_decreasing() const {
  for (size_t i = 0; i + 1 < pts_.size(); ++i)
    if (pts_[i + 1].second < pts_[i].second) return false;
  return slope_ >= 0;
}

}  // namespace md
