/**
 * @file grid.hpp
 * @brief Masked uniform Cartesian grids over the canonical domains and scalar fields on them.
 *
 * Interior nodes are lattice points strictly inside the domain. Whenever a
 * stencil ray leaves the domain before reaching the next lattice point, the
 * crossing point becomes a boundary node and the neighbour is recorded with a
 * fractional step (Shortley-Weller closure). Lattice points lying on the
 * boundary are boundary nodes as well.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pucci/geometry.hpp"

namespace pucci {

/// Ellipticity constants lambda <= Lambda, drift bound gamma, integrability q and reference radius R0.
struct EllipticityParams {
  double lambda = 1.0;
  double Lambda = 1.0;
  double gamma = 0.0;
  double q = 4.0;
  double R0 = 1.0;

  /// gamma_{R0} = max{gamma, gamma * R0}
  double gamma_R0() const { return std::max(gamma, gamma * R0); }

  void validate(int dimension) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
    if (!(Lambda >= lambda) || !std::isfinite(Lambda)) throw std::invalid_argument("Lambda must satisfy Lambda >= lambda");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be nonnegative");
    if (!(q > dimension)) throw std::invalid_argument("q must exceed the dimension");
    if (!(R0 > 0.0)) throw std::invalid_argument("R0 must be positive");
  }

  bool operator==(const EllipticityParams&) const = default;
};

enum class NodeTag : std::uint8_t { interior, dirichlet_boundary, flat_boundary };

inline std::string to_string(NodeTag t) {
  switch (t) {
    case NodeTag::interior: return "interior";
    case NodeTag::dirichlet_boundary: return "dirichlet-boundary";
    case NodeTag::flat_boundary: return "flat-boundary";
  }
  return "?";
}

template <int Dim>
using LatticeVector = std::array<int, Dim>;

/**
 * Lattice directions available to the stencil and the orthogonal frames built
 * from them. The first Dim directions are always the coordinate axes.
 */
template <int Dim>
struct StencilSet {
  std::vector<LatticeVector<Dim>> directions;
  std::vector<std::array<int, Dim>> frames;  // indices into directions, mutually orthogonal

  static StencilSet axis_only() {
    StencilSet s;
    std::array<int, Dim> frame{};
    for (int k = 0; k < Dim; ++k) {
      LatticeVector<Dim> e{};
      e[k] = 1;
      s.directions.push_back(e);
      frame[k] = k;
    }
    s.frames.push_back(frame);
    return s;
  }

  /// 2D: axes plus 45 degree diagonals. 3D: the 13-direction lattice set with four frames.
  static StencilSet standard() {
    StencilSet s = axis_only();
    if constexpr (Dim == 2) {
      s.directions.push_back({1, 1});
      s.directions.push_back({1, -1});
      s.frames.push_back({2, 3});
    } else if constexpr (Dim == 3) {
      const std::vector<LatticeVector<3>> extra = {{1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1},
                                                   {0, 1, 1}, {0, 1, -1}, {1, 1, 1}, {1, 1, -1},
                                                   {1, -1, 1}, {1, -1, -1}};
      for (const auto& d : extra) s.directions.push_back(d);
      s.frames.push_back({3, 4, 2});
      s.frames.push_back({5, 6, 1});
      s.frames.push_back({7, 8, 0});
    }
    return s;
  }

  int width() const {
    int w = 0;
    for (const auto& d : directions)
      for (int c : d) w = std::max(w, std::abs(c));
    return w;
  }

  void validate() const {
    if (frames.empty()) throw std::invalid_argument("rotation set must contain at least one frame");
    if (static_cast<int>(directions.size()) < Dim) throw std::invalid_argument("stencil needs the axis directions");
    for (int k = 0; k < Dim; ++k)
      for (int j = 0; j < Dim; ++j)
        if (directions[k][j] != (j == k ? 1 : 0))
          throw std::invalid_argument("the first directions of a stencil must be the coordinate axes");
    for (const auto& f : frames) {
      for (int a = 0; a < Dim; ++a) {
        if (f[a] < 0 || f[a] >= static_cast<int>(directions.size()))
          throw std::invalid_argument("frame references an unknown direction");
        for (int b = a + 1; b < Dim; ++b) {
          long dp = 0;
          for (int k = 0; k < Dim; ++k) dp += long(directions[f[a]][k]) * directions[f[b]][k];
          if (dp != 0) throw std::invalid_argument("frame directions must be orthogonal");
        }
      }
    }
  }
};

template <int Dim>
struct GridNode {
  Point<Dim> x;
  NodeTag tag;
  BoundaryPart part;  // meaningful for boundary nodes only
};

/// Neighbour of an interior node along a stencil ray: node id and the fraction t in (0,1] of a full step.
struct Neighbor {
  std::uint32_t node;
  double t;
};

template <int Dim>
class Grid {
 public:
  static constexpr double kSnapFraction = 1e-6;

  Grid(DomainDescriptor<Dim> domain, double h, StencilSet<Dim> stencil = StencilSet<Dim>::standard())
      : domain_(domain), h_(h), stencil_(std::move(stencil)) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid spacing must be positive");
    if (h > domain.outer_radius()) throw std::invalid_argument("grid spacing exceeds the domain radius");
    stencil_.validate();
    build();
  }

  const DomainDescriptor<Dim>& domain() const { return domain_; }
  double h() const { return h_; }
  const StencilSet<Dim>& stencil() const { return stencil_; }
  std::size_t size() const { return nodes_.size(); }
  const GridNode<Dim>& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<GridNode<Dim>>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& interior() const { return interior_; }
  std::size_t interior_count() const { return interior_.size(); }
  int interior_ordinal(std::size_t node) const { return ordinal_[node]; }
  std::size_t direction_count() const { return stencil_.directions.size(); }

  /// Neighbour of the k-th interior node along direction d with sign (+1 forward, -1 backward).
  const Neighbor& neighbor(std::size_t interior_index, std::size_t d, int sign) const {
    return neighbors_[(interior_index * direction_count() + d) * 2 + (sign > 0 ? 0 : 1)];
  }

  /// Node id of a lattice point x = center + h*index, or -1 if it is not a node.
  long lattice_node(const LatticeVector<Dim>& index) const {
    std::size_t flat = 0;
    for (int k = 0; k < Dim; ++k) {
      const int v = index[k] + half_extent_;
      if (v < 0 || v >= extent_) return -1;
      flat = flat * extent_ + v;
    }
    return lattice_[flat];
  }

  LatticeVector<Dim> lattice_index_of(const Point<Dim>& x) const {
    LatticeVector<Dim> idx{};
    for (int k = 0; k < Dim; ++k)
      idx[k] = static_cast<int>(std::lround((x[k] - domain_.center()[k]) / h_));
    return idx;
  }

  Point<Dim> lattice_point(const LatticeVector<Dim>& idx) const {
    Point<Dim> x = domain_.center();
    for (int k = 0; k < Dim; ++k) x[k] += h_ * idx[k];
    return x;
  }

  int half_extent() const { return half_extent_; }

  /// Same node structure with every coordinate mapped x -> center' + s*(x - center).
  Grid scaled(double s) const {
    if (!(s > 0.0)) throw std::invalid_argument("scale factor must be positive");
    Grid g = *this;
    Point<Dim> c = s * domain_.center();
    g.domain_ = DomainDescriptor<Dim>(domain_.kind(), s * domain_.outer_radius(), c);
    g.h_ = s * h_;
    for (auto& n : g.nodes_) n.x = s * n.x;
    return g;
  }

  std::string descriptor_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"h\":" << h_ << ",\"kind\":\"" << to_string(domain_.kind()) << "\",\"n\":" << Dim
       << ",\"r\":" << domain_.outer_radius() << "}";
    return os.str();
  }

 private:
  void build() {
    half_extent_ = static_cast<int>(std::ceil(domain_.outer_radius() / h_)) + 1;
    extent_ = 2 * half_extent_ + 1;
    std::size_t total = 1;
    for (int k = 0; k < Dim; ++k) total *= extent_;
    lattice_.assign(total, -1);

    // Lattice points closer than snap to the boundary become boundary nodes, so every
    // cut fraction t is at least snap/(h*|d|).
    const double snap = kSnapFraction * h_;
    const double eps = 1e-9 * h_;
    LatticeVector<Dim> idx{};
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int k = Dim - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(rem % extent_) - half_extent_;
        rem /= extent_;
      }
      const Point<Dim> x = lattice_point(idx);
      const double sd = domain_.signed_distance(x);
      if (sd > snap) {
        lattice_[flat] = add_node(x, NodeTag::interior, BoundaryPart::outer_sphere);
      } else if (sd >= -eps) {
        lattice_[flat] = add_node(x, boundary_tag(x), classify_part(x));
      }
    }

    ordinal_.assign(nodes_.size(), -1);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].tag == NodeTag::interior) {
        ordinal_[i] = static_cast<int>(interior_.size());
        interior_.push_back(static_cast<std::uint32_t>(i));
      }

    const std::size_t nd = direction_count();
    neighbors_.resize(interior_.size() * nd * 2);
    std::map<std::array<long long, Dim>, std::uint32_t> crossings;
    for (std::size_t k = 0; k < interior_.size(); ++k) {
      const Point<Dim> x = nodes_[interior_[k]].x;
      const LatticeVector<Dim> base = lattice_index_of(x);
      for (std::size_t d = 0; d < nd; ++d) {
        for (int sign : {1, -1}) {
          Point<Dim> v{};
          LatticeVector<Dim> j = base;
          for (int c = 0; c < Dim; ++c) {
            v[c] = sign * h_ * stencil_.directions[d][c];
            j[c] += sign * stencil_.directions[d][c];
          }
          const auto hit = domain_.first_exit(x, v, 1.0);
          const long lattice_id = lattice_node(j);
          Neighbor nb{};
          if (hit && (hit->s < 1.0 - 1e-9 || lattice_id < 0)) {
            const Point<Dim> y = x + hit->s * v;
            std::array<long long, Dim> key{};
            for (int c = 0; c < Dim; ++c) key[c] = std::llround(y[c] / (h_ * 1e-7));
            auto it = crossings.find(key);
            std::uint32_t id;
            if (it == crossings.end()) {
              const NodeTag tag = hit->part == BoundaryPart::flat ? NodeTag::flat_boundary
                                                                  : NodeTag::dirichlet_boundary;
              id = add_node(y, tag, hit->part);
              ordinal_.push_back(-1);
              crossings.emplace(key, id);
            } else {
              id = it->second;
            }
            nb = Neighbor{id, hit->s};
          } else {
            if (lattice_id < 0) throw std::logic_error("stencil neighbour missing without boundary closure");
            nb = Neighbor{static_cast<std::uint32_t>(lattice_id), 1.0};
          }
          neighbors_[(k * nd + d) * 2 + (sign > 0 ? 0 : 1)] = nb;
        }
      }
    }
  }

  std::uint32_t add_node(const Point<Dim>& x, NodeTag tag, BoundaryPart part) {
    nodes_.push_back(GridNode<Dim>{x, tag, part});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  /// Boundary component nearest to x.
  BoundaryPart classify_part(const Point<Dim>& x) const {
    const double rho = distance<Dim>(x, domain_.center());
    BoundaryPart best = BoundaryPart::outer_sphere;
    double d = std::abs(domain_.outer_radius() - rho);
    if (domain_.kind() == DomainKind::annulus && std::abs(rho - domain_.inner_radius()) < d)
      best = BoundaryPart::inner_sphere;
    if (domain_.kind() == DomainKind::half_ball && std::abs(domain_.height(x)) <= d) best = BoundaryPart::flat;
    return best;
  }

  NodeTag boundary_tag(const Point<Dim>& x) const {
    return classify_part(x) == BoundaryPart::flat ? NodeTag::flat_boundary : NodeTag::dirichlet_boundary;
  }

  DomainDescriptor<Dim> domain_;
  double h_;
  StencilSet<Dim> stencil_;
  int half_extent_ = 0;
  int extent_ = 0;
  std::vector<GridNode<Dim>> nodes_;
  std::vector<long> lattice_;
  std::vector<std::uint32_t> interior_;
  std::vector<int> ordinal_;
  std::vector<Neighbor> neighbors_;
};

template <int Dim>
using GridPtr = std::shared_ptr<const Grid<Dim>>;

template <int Dim>
GridPtr<Dim> make_grid(DomainDescriptor<Dim> domain, double h,
                       StencilSet<Dim> stencil = StencilSet<Dim>::standard()) {
  return std::make_shared<const Grid<Dim>>(domain, h, std::move(stencil));
}

/// Values of a function (u, f or boundary data) at every node of a grid.
template <int Dim>
class ScalarField {
 public:
  ScalarField(GridPtr<Dim> grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("field needs a grid");
    if (values_.size() != grid_->size()) throw std::invalid_argument("field size does not match node count");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::domain_error("field values must be finite");
  }

  const Grid<Dim>& grid() const { return *grid_; }
  const GridPtr<Dim>& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  GridPtr<Dim> grid_;
  std::vector<double> values_;
};

template <int Dim, class Fn>
ScalarField<Dim> sample(const GridPtr<Dim>& grid, Fn&& fn) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) v[i] = fn(grid->node(i).x);
  return ScalarField<Dim>(grid, std::move(v));
}

template <int Dim>
ScalarField<Dim> constant_field(const GridPtr<Dim>& grid, double c) {
  return ScalarField<Dim>(grid, std::vector<double>(grid->size(), c));
}

namespace detail {

/**
 * Midpoint rule over lattice cells clipped to the domain. The inside fraction
 * of a cut cell is measured by sub-sampling. visit(cell_center, lattice_index,
 * volume, inside_centroid) is called for each cell with positive volume.
 */
template <int Dim, class Visit>
void for_each_clipped_cell(const DomainDescriptor<Dim>& dom, double h, Visit&& visit) {
  const int n = static_cast<int>(std::ceil(dom.outer_radius() / h)) + 1;
  const int extent = 2 * n + 1;
  const int sub = Dim == 2 ? 16 : 8;
  const double half_diag = 0.5 * h * std::sqrt(double(Dim));
  const double cell_volume = std::pow(h, Dim);
  std::size_t total = 1;
  for (int k = 0; k < Dim; ++k) total *= extent;
  LatticeVector<Dim> idx{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int k = Dim - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(rem % extent) - n;
      rem /= extent;
    }
    Point<Dim> c = dom.center();
    for (int k = 0; k < Dim; ++k) c[k] += h * idx[k];
    const double sd = dom.signed_distance(c);
    if (sd >= half_diag) {
      visit(c, idx, cell_volume, c);
      continue;
    }
    if (sd <= -half_diag) continue;
    std::size_t inside = 0, count = 1;
    for (int k = 0; k < Dim; ++k) count *= sub;
    Point<Dim> centroid{};
    for (std::size_t s = 0; s < count; ++s) {
      std::size_t r = s;
      Point<Dim> p = c;
      for (int k = 0; k < Dim; ++k) {
        const int j = static_cast<int>(r % sub);
        r /= sub;
        p[k] += h * ((j + 0.5) / sub - 0.5);
      }
      if (dom.contains(p)) {
        ++inside;
        centroid = centroid + p;
      }
    }
    if (inside == 0) continue;
    centroid = (1.0 / double(inside)) * centroid;
    visit(c, idx, cell_volume * double(inside) / double(count), centroid);
  }
}

}  // namespace detail

/// (sum |f_i|^q vol_i)^{1/q} with boundary cells clipped to the domain.
template <int Dim>
double lq_norm(const ScalarField<Dim>& f, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("lq_norm needs a finite exponent q >= 1");
  const Grid<Dim>& g = f.grid();
  double acc = 0.0;
  detail::for_each_clipped_cell<Dim>(g.domain(), g.h(), [&](const Point<Dim>&, const LatticeVector<Dim>& idx,
                                                            double vol, const Point<Dim>& centroid) {
    long id = g.lattice_node(idx);
    if (id < 0) {
      // cell centred outside the domain: borrow the closest lattice node of the 3^n block
      double best = std::numeric_limits<double>::infinity();
      std::size_t count = 1;
      for (int k = 0; k < Dim; ++k) count *= 3;
      for (std::size_t s = 0; s < count; ++s) {
        std::size_t r = s;
        LatticeVector<Dim> j = idx;
        for (int k = 0; k < Dim; ++k) {
          j[k] += static_cast<int>(r % 3) - 1;
          r /= 3;
        }
        const long cand = g.lattice_node(j);
        if (cand < 0) continue;
        const double d = distance<Dim>(g.node(cand).x, centroid);
        if (d < best) {
          best = d;
          id = cand;
        }
      }
      if (id < 0) return;
    }
    acc += std::pow(std::abs(f[static_cast<std::size_t>(id)]), q) * vol;
  });
  return std::pow(acc, 1.0 / q);
}

/// L^q norm of an analytic function by the same clipped midpoint rule.
template <int Dim, class Fn>
double lq_norm(const DomainDescriptor<Dim>& dom, double h, Fn&& fn, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("lq_norm needs a finite exponent q >= 1");
  double acc = 0.0;
  detail::for_each_clipped_cell<Dim>(dom, h, [&](const Point<Dim>& c, const LatticeVector<Dim>&, double vol,
                                                 const Point<Dim>& centroid) {
    const double v = fn(dom.in_closure(c) ? c : centroid);
    if (!std::isfinite(v)) throw std::domain_error("lq_norm integrand is not finite");
    acc += std::pow(std::abs(v), q) * vol;
  });
  return std::pow(acc, 1.0 / q);
}

/// Transformation factors carried by v(x) = alpha*u(beta*x): f -> alpha*beta^2 f(beta x), gamma -> beta gamma(beta x).
struct RescaleInfo {
  double alpha;
  double beta;
  double rhs_factor;
  double drift_factor;
};

template <int Dim>
struct RescaledField {
  ScalarField<Dim> field;
  RescaleInfo info;
};

/**
 * v(x) = alpha*u(beta*x) on beta^{-1}*domain. The target grid is the source
 * grid mapped by 1/beta, so nodes correspond one to one and no interpolation
 * happens.
 */
template <int Dim>
RescaledField<Dim> rescale_field(const ScalarField<Dim>& u, double alpha, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha))
    throw std::invalid_argument("rescale needs finite alpha and positive beta");
  auto target = std::make_shared<const Grid<Dim>>(u.grid().scaled(1.0 / beta));
  std::vector<double> v(u.values());
  for (double& x : v) x *= alpha;
  return {ScalarField<Dim>(target, std::move(v)), RescaleInfo{alpha, beta, alpha * beta * beta, beta}};
}

/**
 * v(x) = alpha*u(beta*x) evaluated on a caller-supplied grid by multilinear
 * interpolation over the source lattice. Rejects any node whose preimage is
 * not surrounded by source lattice nodes.
 */
template <int Dim>
ScalarField<Dim> rescale_field_onto(const ScalarField<Dim>& u, double alpha, double beta, const GridPtr<Dim>& target);

/// Multilinear interpolation of a field at x over the surrounding lattice cell; empty if a corner is missing.
template <int Dim>
std::optional<double> interpolate(const ScalarField<Dim>& u, const Point<Dim>& x) {
  const Grid<Dim>& g = u.grid();
  LatticeVector<Dim> base{};
  Point<Dim> frac{};
  for (int k = 0; k < Dim; ++k) {
    const double s = (x[k] - g.domain().center()[k]) / g.h();
    double fl = std::floor(s);
    if (s - fl > 1.0 - 1e-12) fl += 1.0;
    base[k] = static_cast<int>(fl);
    frac[k] = std::max(0.0, s - fl);
  }
  double value = 0.0;
  for (int corner = 0; corner < (1 << Dim); ++corner) {
    LatticeVector<Dim> j = base;
    double w = 1.0;
    for (int k = 0; k < Dim; ++k) {
      const int bit = (corner >> k) & 1;
      j[k] += bit;
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    if (w == 0.0) continue;
    const long id = g.lattice_node(j);
    if (id < 0) return std::nullopt;
    value += w * u[static_cast<std::size_t>(id)];
  }
  return value;
}

template <int Dim>
ScalarField<Dim> rescale_field_onto(const ScalarField<Dim>& u, double alpha, double beta, const GridPtr<Dim>& target) {
  if (!(beta > 0.0)) throw std::invalid_argument("rescale needs positive beta");
  std::vector<double> v(target->size());
  for (std::size_t i = 0; i < target->size(); ++i) {
    const auto val = interpolate(u, beta * target->node(i).x);
    if (!val) throw std::domain_error("rescale would require extrapolation outside the source grid");
    v[i] = alpha * *val;
  }
  return ScalarField<Dim>(target, std::move(v));
}

/// CSV with columns x1..xn,value,tag.
template <int Dim>
void write_csv(std::ostream& os, const ScalarField<Dim>& f) {
  for (int k = 0; k < Dim; ++k) os << "x" << (k + 1) << ",";
  os << "value,tag\n";
  os.precision(17);
  const auto& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int k = 0; k < Dim; ++k) os << g.node(i).x[k] << ",";
    os << f[i] << "," << to_string(g.node(i).tag) << "\n";
  }
}

}  // namespace pucci
