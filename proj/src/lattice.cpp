#include "entlab/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace entlab {

Torus::Torus(int nu_, int L_) : nu(nu_), L(L_) {
  if (nu < 1 || nu > 4) throw parameter_error("Torus: nu must be in [1,4]");
  if (L < 2) throw parameter_error("Torus: L must be >= 2");
  sites_ = 1;
  for (int i = 0; i < nu; ++i) {
    sites_ *= L;
    if (sites_ > (1L << 24)) throw capacity_error("Torus: too many sites");
  }
}

std::vector<int> Torus::coords(long site) const {
  if (site < 0 || site >= sites_) throw parameter_error("Torus::coords: site out of range");
  std::vector<int> c(static_cast<size_t>(nu));
  for (int i = nu - 1; i >= 0; --i) {
    c[size_t(i)] = int(site % L);
    site /= L;
  }
  return c;
}

long Torus::site(const std::vector<int>& coords) const {
  if (int(coords.size()) != nu) throw parameter_error("Torus::site: wrong coordinate count");
  long s = 0;
  for (int i = 0; i < nu; ++i) {
    if (coords[size_t(i)] < 0 || coords[size_t(i)] >= L)
      throw parameter_error("Torus::site: coordinate out of range");
    s = s * L + coords[size_t(i)];
  }
  return s;
}

int Torus::distance(long a, long b) const {
  auto ca = coords(a), cb = coords(b);
  int d = 0;
  for (int i = 0; i < nu; ++i) {
    int dx = std::abs(ca[size_t(i)] - cb[size_t(i)]);
    d += std::min(dx, L - dx);
  }
  return d;
}

std::vector<long> Torus::ball(long center, int r) const {
  if (r < 0) throw parameter_error("Torus::ball: negative radius");
  std::vector<long> out;
  for (long s = 0; s < sites_; ++s)
    if (distance(center, s) <= r) out.push_back(s);
  return out;
}

std::vector<long> Torus::neighbors(long site) const {
  auto c = coords(site);
  std::set<long> out;
  for (int i = 0; i < nu; ++i) {
    for (int step : {-1, +1}) {
      auto n = c;
      n[size_t(i)] = (n[size_t(i)] + step + L) % L;
      long ns = this->site(n);
      if (ns != site) out.insert(ns);
    }
  }
  return std::vector<long>(out.begin(), out.end());
}

Region make_region(const Torus& t, std::vector<long> sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  for (long s : sites)
    if (s < 0 || s >= t.site_count()) throw parameter_error("make_region: site out of range");
  return sites;
}

Region parse_region(const Torus& t, const std::string& text) {
  auto fail = [&](const std::string& why) {
    throw parameter_error("parse_region: " + why + " in '" + text + "'");
  };
  if (text.empty()) fail("empty literal");

  if (text.find("..") != std::string::npos) {
    // Slab form: one "a..b" range per axis, joined by 'x'.
    std::vector<std::pair<int, int>> ranges;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t next = text.find('x', pos);
      std::string part = text.substr(pos, next == std::string::npos ? next : next - pos);
      size_t dots = part.find("..");
      if (dots == std::string::npos) fail("range without '..'");
      try {
        int a = std::stoi(part.substr(0, dots));
        int b = std::stoi(part.substr(dots + 2));
        ranges.emplace_back(a, b);
      } catch (const std::exception&) {
        fail("malformed range bound");
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (int(ranges.size()) != t.nu) fail("axis count does not match the lattice dimension");
    std::vector<long> sites;
    std::vector<int> c(static_cast<size_t>(t.nu));
    std::function<void(int)> rec = [&](int axis) {
      if (axis == t.nu) {
        sites.push_back(t.site(c));
        return;
      }
      auto [a, b] = ranges[size_t(axis)];
      if (a < 0 || b >= t.L || a > b) fail("range outside [0, L)");
      for (int x = a; x <= b; ++x) {
        c[size_t(axis)] = x;
        rec(axis + 1);
      }
    };
    rec(0);
    return make_region(t, std::move(sites));
  }

  // Coordinate-list form.
  std::vector<long> sites;
  std::string cleaned;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) cleaned += ch;
  size_t pos = 0;
  while (pos < cleaned.size()) {
    std::vector<int> c;
    if (cleaned[pos] == '(') {
      size_t close = cleaned.find(')', pos);
      if (close == std::string::npos) fail("unbalanced parenthesis");
      std::string tuple = cleaned.substr(pos + 1, close - pos - 1);
      size_t p = 0;
      while (p <= tuple.size()) {
        size_t comma = tuple.find(',', p);
        try {
          c.push_back(std::stoi(tuple.substr(p, comma == std::string::npos ? comma : comma - p)));
        } catch (const std::exception&) {
          fail("malformed coordinate");
        }
        if (comma == std::string::npos) break;
        p = comma + 1;
      }
      pos = close + 1;
      if (pos < cleaned.size() && cleaned[pos] == ',') ++pos;
    } else {
      // Bare integers, nu = 1 convenience.
      size_t comma = cleaned.find(',', pos);
      try {
        c.push_back(std::stoi(cleaned.substr(pos, comma == std::string::npos ? comma : comma - pos)));
      } catch (const std::exception&) {
        fail("malformed coordinate");
      }
      pos = comma == std::string::npos ? cleaned.size() : comma + 1;
    }
    if (int(c.size()) != t.nu) fail("tuple arity does not match the lattice dimension");
    sites.push_back(t.site(c));
  }
  if (sites.empty()) fail("no sites");
  return make_region(t, std::move(sites));
}

BoundaryData boundary_and_area(const Torus& t, const Region& region) {
  if (region.empty() || long(region.size()) == t.site_count())
    throw parameter_error("boundary_and_area: region must be a proper nonempty subset");
  std::vector<char> inside(size_t(t.site_count()), 0);
  for (long s : region) inside[size_t(s)] = 1;

  BoundaryData bd;
  for (long s = 0; s < t.site_count(); ++s) {
    bool has_in = false, has_out = false;
    for (long n : t.neighbors(s)) (inside[size_t(n)] ? has_in : has_out) = true;
    if (inside[size_t(s)] && has_out) bd.inner.push_back(s);
    if (!inside[size_t(s)] && has_in) bd.outer.push_back(s);
  }
  bd.area = std::max(long(bd.inner.size()), long(bd.outer.size()));
  return bd;
}

CutProfile boundary_profile(const Torus& t, const Region& region) {
  BoundaryData bd = boundary_and_area(t, region);
  std::vector<char> inside(size_t(t.site_count()), 0);
  for (long s : region) inside[size_t(s)] = 1;

  CutProfile p;
  p.area = bd.area;
  p.m.resize(size_t(t.site_count()));
  int max_m = 0;
  for (long s = 0; s < t.site_count(); ++s) {
    const Region& own = inside[size_t(s)] ? bd.inner : bd.outer;
    int best = std::numeric_limits<int>::max();
    for (long b : own) best = std::min(best, t.distance(s, b));
    p.m[size_t(s)] = best;
    max_m = std::max(max_m, best);
  }
  p.counts.assign(size_t(max_m) + 1, 0);
  for (int mv : p.m) ++p.counts[size_t(mv)];
  for (size_t r = 1; r < p.counts.size(); ++r) p.counts[r] += p.counts[r - 1];
  p.cap.resize(p.counts.size());
  for (size_t r = 0; r < p.cap.size(); ++r) {
    double c = 2.0 * double(bd.area) * std::pow(2.0 * double(r) + 1.0, t.nu);
    p.cap[r] = long(std::min(c, 4.0 * double(t.site_count())));
  }
  return p;
}

ReproducingReport reproducing_constant(const Torus& t, const std::vector<double>& kernel) {
  // Diameter of the torus under the l1 metric.
  int diam = t.nu * (t.L / 2);
  if (int(kernel.size()) < diam + 1)
    throw parameter_error("reproducing_constant: kernel shorter than the torus diameter");
  for (double k : kernel)
    if (!(k > 0)) throw parameter_error("reproducing_constant: kernel values must be positive");

  // By translation invariance the worst pair can be anchored at v = 0.
  ReproducingReport rep;
  rep.lambda = 0.0;
  rep.witness_site = 0;
  rep.ratios.resize(size_t(t.site_count()));
  for (long w = 0; w < t.site_count(); ++w) {
    double s = 0.0;
    for (long x = 0; x < t.site_count(); ++x)
      s += kernel[size_t(t.distance(0, x))] * kernel[size_t(t.distance(x, w))];
    const double ratio = s / kernel[size_t(t.distance(0, w))];
    rep.ratios[size_t(w)] = ratio;
    if (ratio > rep.lambda) {
      rep.lambda = ratio;
      rep.witness_site = w;
    }
  }
  return rep;
}

std::vector<double> exponential_kernel(const Torus& t, double mu) {
  if (!(mu > 0)) throw parameter_error("exponential_kernel: mu must be positive");
  int diam = t.nu * (t.L / 2);
  std::vector<double> k(size_t(diam) + 1);
  for (int d = 0; d <= diam; ++d) k[size_t(d)] = std::exp(-mu * d);
  return k;
}

}  // namespace entlab
