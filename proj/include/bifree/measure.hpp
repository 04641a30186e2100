#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "bifree/errors.hpp"

namespace bifree {

using cplx = std::complex<double>;

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kAtomMergeDistance = 1e-12;

struct Atom1D {
    double location = 0.0;
    double mass = 0.0;
};

/// A quadrature node of the absolutely continuous part: the Cauchy transform
/// treats it as a point mass of weight `w` at `x`.
struct QuadNode {
    double x = 0.0;
    double w = 0.0;
};

struct PlanarAtom {
    double x = 0.0;
    double y = 0.0;
    double mass = 0.0;
};

struct GridNode {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
};

namespace detail {

inline void check_total_mass(double total, bool renormalize, const char* what) {
    if (std::abs(total - 1.0) > kMassTolerance && !renormalize)
        throw SchemaError(std::string(what) + ": total mass " + std::to_string(total) +
                          " differs from 1 beyond tolerance (pass renormalize to rescale)");
    if (total <= 0.0)
        throw SchemaError(std::string(what) + ": nonpositive total mass");
}

} // namespace detail

/// Compactly supported probability measure on the real line: finitely many
/// atoms plus an optional quadrature representation of a density part.
/// Immutable after construction; all evaluations are pure.
class Measure1D {
public:
    Measure1D(std::vector<Atom1D> atoms, std::vector<QuadNode> density = {},
              bool renormalize = false)
        : atoms_(std::move(atoms)), density_(std::move(density)) {
        for (const auto& a : atoms_)
            if (!(a.mass > 0.0)) throw SchemaError("Measure1D: atom mass must be > 0");
        for (const auto& q : density_)
            if (q.w < 0.0) throw SchemaError("Measure1D: negative quadrature weight");
        merge_close_atoms();
        double total = 0.0;
        for (const auto& a : atoms_) total += a.mass;
        for (const auto& q : density_) total += q.w;
        detail::check_total_mass(total, renormalize, "Measure1D");
        if (renormalize && std::abs(total - 1.0) > 0.0) {
            for (auto& a : atoms_) a.mass /= total;
            for (auto& q : density_) q.w /= total;
        }
        support_min_ = std::numeric_limits<double>::infinity();
        support_max_ = -std::numeric_limits<double>::infinity();
        for (const auto& a : atoms_) {
            support_min_ = std::min(support_min_, a.location);
            support_max_ = std::max(support_max_, a.location);
        }
        for (const auto& q : density_) {
            support_min_ = std::min(support_min_, q.x);
            support_max_ = std::max(support_max_, q.x);
        }
    }

    static Measure1D dirac(double c) { return Measure1D({{c, 1.0}}); }

    const std::vector<Atom1D>& atoms() const { return atoms_; }
    const std::vector<QuadNode>& density() const { return density_; }
    double support_min() const { return support_min_; }
    double support_max() const { return support_max_; }

    double atom_mass_at(double x) const {
        for (const auto& a : atoms_)
            if (std::abs(a.location - x) <= kAtomMergeDistance) return a.mass;
        return 0.0;
    }

    /// G(z) = \int d\mu(t) / (z - t), exact over atoms, weighted sum over
    /// quadrature nodes.  Satisfies G(conj z) = conj G(z).
    cplx cauchy(cplx z) const {
        if (z.imag() == 0.0) {
            for (const auto& a : atoms_)
                if (std::abs(z.real() - a.location) <= kAtomMergeDistance)
                    throw PoleAtArgument("cauchy1d: argument coincides with an atom");
        }
        cplx g = 0.0;
        for (const auto& a : atoms_) g += a.mass / (z - a.location);
        for (const auto& q : density_) g += q.w / (z - q.x);
        return g;
    }

    /// d/dz of the Cauchy transform, used by extrapolation diagnostics.
    cplx cauchy_derivative(cplx z) const {
        cplx g = 0.0;
        for (const auto& a : atoms_) {
            cplx d = z - a.location;
            g -= a.mass / (d * d);
        }
        for (const auto& q : density_) {
            cplx d = z - q.x;
            g -= q.w / (d * d);
        }
        return g;
    }

    std::vector<double> moments(int order) const {
        std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
        for (const auto& a : atoms_) {
            double p = 1.0;
            for (int k = 0; k <= order; ++k, p *= a.location) m[static_cast<std::size_t>(k)] += a.mass * p;
        }
        for (const auto& q : density_) {
            double p = 1.0;
            for (int k = 0; k <= order; ++k, p *= q.x) m[static_cast<std::size_t>(k)] += q.w * p;
        }
        return m;
    }

private:
    void merge_close_atoms() {
        if (atoms_.empty()) return;
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom1D& a, const Atom1D& b) { return a.location < b.location; });
        std::vector<Atom1D> merged;
        for (const auto& a : atoms_) {
            if (!merged.empty() && std::abs(a.location - merged.back().location) <= kAtomMergeDistance)
                merged.back().mass += a.mass;
            else
                merged.push_back(a);
        }
        atoms_ = std::move(merged);
    }

    std::vector<Atom1D> atoms_;
    std::vector<QuadNode> density_;
    double support_min_ = 0.0, support_max_ = 0.0;
};

/// Mixed-moment table m[j][k] = \int t^j s^k d\eta(t,s).
struct MomentTable2D {
    std::vector<std::vector<double>> m;

    double at(int j, int k) const { return m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]; }
    int order() const { return static_cast<int>(m.size()) - 1; }
};

/// Compactly supported probability measure on R^2: finitely many atoms plus
/// an optional grid-sampled density part.
class PlanarMeasure {
public:
    PlanarMeasure(std::vector<PlanarAtom> atoms, std::vector<GridNode> grid = {},
                  bool renormalize = false)
        : atoms_(std::move(atoms)), grid_(std::move(grid)) {
        for (const auto& a : atoms_)
            if (!(a.mass > 0.0)) throw SchemaError("PlanarMeasure: atom mass must be > 0");
        for (const auto& g : grid_)
            if (g.w < 0.0) throw SchemaError("PlanarMeasure: negative grid weight");
        merge_close_atoms();
        double total = 0.0;
        for (const auto& a : atoms_) total += a.mass;
        for (const auto& g : grid_) total += g.w;
        detail::check_total_mass(total, renormalize, "PlanarMeasure");
        if (renormalize && std::abs(total - 1.0) > 0.0) {
            for (auto& a : atoms_) a.mass /= total;
            for (auto& g : grid_) g.w /= total;
        }
    }

    static PlanarMeasure dirac(double x, double y) { return PlanarMeasure({{x, y, 1.0}}); }

    /// Product measure mu x nu of two atomic/quadrature measures.
    static PlanarMeasure product(const Measure1D& mu, const Measure1D& nu) {
        std::vector<PlanarAtom> atoms;
        std::vector<GridNode> grid;
        auto xs = collect(mu);
        auto ys = collect(nu);
        for (const auto& [x, px, xa] : xs)
            for (const auto& [y, py, ya] : ys) {
                if (xa && ya)
                    atoms.push_back({x, y, px * py});
                else
                    grid.push_back({x, y, px * py});
            }
        return PlanarMeasure(std::move(atoms), std::move(grid));
    }

    const std::vector<PlanarAtom>& atoms() const { return atoms_; }
    const std::vector<GridNode>& grid() const { return grid_; }

    double atom_mass_at(double x, double y) const {
        for (const auto& a : atoms_)
            if (std::abs(a.x - x) <= kAtomMergeDistance && std::abs(a.y - y) <= kAtomMergeDistance)
                return a.mass;
        return 0.0;
    }

    /// G(z,w) = \int d\eta(t,s) / ((z-t)(w-s)).
    cplx cauchy2(cplx z, cplx w) const {
        if (z.imag() == 0.0 || w.imag() == 0.0) {
            for (const auto& a : atoms_) {
                bool zpole = z.imag() == 0.0 && std::abs(z.real() - a.x) <= kAtomMergeDistance;
                bool wpole = w.imag() == 0.0 && std::abs(w.real() - a.y) <= kAtomMergeDistance;
                if (zpole || wpole)
                    throw PoleAtArgument("cauchy2d: argument coincides with an atom coordinate");
            }
        }
        cplx g = 0.0;
        for (const auto& a : atoms_) g += a.mass / ((z - a.x) * (w - a.y));
        for (const auto& n : grid_) g += n.w / ((z - n.x) * (w - n.y));
        return g;
    }

    /// Projections onto the two coordinates; equal projected locations merge.
    std::pair<Measure1D, Measure1D> marginals() const {
        std::vector<Atom1D> ax, ay;
        std::vector<QuadNode> dx, dy;
        for (const auto& a : atoms_) {
            ax.push_back({a.x, a.mass});
            ay.push_back({a.y, a.mass});
        }
        for (const auto& g : grid_) {
            dx.push_back({g.x, g.w});
            dy.push_back({g.y, g.w});
        }
        merge_nodes(dx);
        merge_nodes(dy);
        return {Measure1D(std::move(ax), std::move(dx)), Measure1D(std::move(ay), std::move(dy))};
    }

    MomentTable2D mixed_moments(int max_order) const {
        std::size_t n = static_cast<std::size_t>(max_order) + 1;
        MomentTable2D t;
        t.m.assign(n, std::vector<double>(n, 0.0));
        auto accumulate = [&](double x, double y, double mass) {
            double px = 1.0;
            for (std::size_t j = 0; j < n; ++j, px *= x) {
                double py = 1.0;
                for (std::size_t k = 0; k < n; ++k, py *= y) t.m[j][k] += mass * px * py;
            }
        };
        for (const auto& a : atoms_) accumulate(a.x, a.y, a.mass);
        for (const auto& g : grid_) accumulate(g.x, g.y, g.w);
        return t;
    }

private:
    static std::vector<std::tuple<double, double, bool>> collect(const Measure1D& m) {
        std::vector<std::tuple<double, double, bool>> out;
        for (const auto& a : m.atoms()) out.emplace_back(a.location, a.mass, true);
        for (const auto& q : m.density()) out.emplace_back(q.x, q.w, false);
        return out;
    }

    static void merge_nodes(std::vector<QuadNode>& nodes) {
        std::sort(nodes.begin(), nodes.end(),
                  [](const QuadNode& a, const QuadNode& b) { return a.x < b.x; });
        std::vector<QuadNode> merged;
        for (const auto& q : nodes) {
            if (!merged.empty() && std::abs(q.x - merged.back().x) <= kAtomMergeDistance)
                merged.back().w += q.w;
            else
                merged.push_back(q);
        }
        nodes = std::move(merged);
    }

    void merge_close_atoms() {
        std::vector<PlanarAtom> merged;
        for (const auto& a : atoms_) {
            bool found = false;
            for (auto& b : merged)
                if (std::abs(a.x - b.x) <= kAtomMergeDistance && std::abs(a.y - b.y) <= kAtomMergeDistance) {
                    b.mass += a.mass;
                    found = true;
                    break;
                }
            if (!found) merged.push_back(a);
        }
        atoms_ = std::move(merged);
    }

    std::vector<PlanarAtom> atoms_;
    std::vector<GridNode> grid_;
};

} // namespace bifree
