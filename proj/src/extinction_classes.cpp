#include "xtinct/extinction_classes.hpp"

#include "xtinct/parallel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace xtinct {

PositionKey position_key(Family f, const Hkl& r) {
  const long h = r(0), k = r(1), l = r(2);
  switch (f) {
    case Family::cubic: return {h * h + k * k + l * l, 0};
    case Family::tetragonal: return {h * h + k * k, l * l};
    case Family::trigonal_hexagonal: return {h * h + h * k + k * k, l * l};
  }
  return {0, 0};
}

bool Fingerprint::present(const PositionKey& key) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), key,
                             [](const auto& cell, const PositionKey& k) {
                               return cell.first < k;
                             });
  return it != cells.end() && it->first == key && it->second;
}

int Partition::group_count() const {
  int n = 0;
  for (const auto& c : classes)
    n += c.size();
  return n;
}

int Partition::max_class_size() const {
  int m = 0;
  for (const auto& c : classes)
    m = std::max(m, c.size());
  return m;
}

int Partition::class_of(int number) const {
  for (size_t i = 0; i < classes.size(); ++i)
    if (std::binary_search(classes[i].members.begin(), classes[i].members.end(), number))
      return static_cast<int>(i);
  return -1;
}

Fingerprint fingerprint(const SpaceGroup& g, int h_max) {
  auto family = family_of_sg(g.number);
  if (!family)
    throw std::invalid_argument("space group " + std::to_string(g.number) +
                                " is not in a supported family");
  if (h_max < kMinFingerprintHMax)
    throw std::invalid_argument("fingerprint needs h_max >= 6");
  std::vector<SymOp> screws;
  for (const SymOp& op : g.ops)
    if (!op.translation.isZero())
      screws.push_back(op);
  std::map<PositionKey, bool> present;
  for (int h = -h_max; h <= h_max; ++h)
    for (int k = -h_max; k <= h_max; ++k)
      for (int l = -h_max; l <= h_max; ++l) {
        Hkl r(h, k, l);
        if (r.isZero())
          continue;
        bool& cell = present[position_key(*family, r)];
        if (!cell)
          cell = !is_extinct(screws, r);
      }
  return {*family, {present.begin(), present.end()}};
}

MissingGroupsError::MissingGroupsError(std::vector<int> g)
    : std::runtime_error([&] {
        std::string msg = "registry is missing space groups:";
        for (int n : g)
          msg += " " + std::to_string(n);
        return msg;
      }()),
      gaps(std::move(g)) {}

Partition compute_classes(Family f, const SpaceGroupRegistry& registry, int h_max,
                          unsigned threads) {
  auto [lo, hi] = sg_range(f);
  if (auto gaps = registry.missing(lo, hi); !gaps.empty())
    throw MissingGroupsError(std::move(gaps));

  std::vector<Fingerprint> prints(static_cast<size_t>(hi - lo + 1));
  parallel_for(prints.size(), threads, [&](size_t i) {
    prints[i] = fingerprint(registry.at(lo + static_cast<int>(i)), h_max);
  });

  // Visiting groups in ascending order keeps classes ordered by their
  // smallest member.
  Partition p{f, {}};
  for (size_t i = 0; i < prints.size(); ++i) {
    int number = lo + static_cast<int>(i);
    auto it = std::find_if(p.classes.begin(), p.classes.end(),
                           [&](const ExtinctionClass& c) { return c.fingerprint == prints[i]; });
    if (it == p.classes.end())
      p.classes.push_back({{number}, std::move(prints[i])});
    else
      it->members.push_back(number);
  }
  return p;
}

double theoretical_topk(const Partition& p, int k) {
  if (k < 1)
    throw std::invalid_argument("k must be >= 1");
  long recoverable = 0, total = 0;
  for (const auto& c : p.classes) {
    recoverable += std::min(k, c.size());
    total += c.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(recoverable) / static_cast<double>(total);
}

std::vector<int> relabel(std::span<const int> labels, const Partition& p) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    int idx = p.class_of(label);
    if (idx < 0)
      throw std::invalid_argument("label " + std::to_string(label) +
                                  " is not a " + std::string(to_string(p.family)) +
                                  " space group");
    out.push_back(idx);
  }
  return out;
}

}  // namespace xtinct
