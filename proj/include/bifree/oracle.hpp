#pragma once

#include <map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bifree/errors.hpp"
#include "bifree/measure.hpp"

namespace bifree {

enum class Face { left, right };

/// One factor of an operator word: which two-faced pair it comes from and
/// whether it is the left (a) or right (b) variable of that pair.
struct WordLetter {
    int pair = 0;
    Face face = Face::left;
};

/// Vacuum expectations on the reduced free product of pointed vector
/// spaces, with each input pair realized as commuting diagonal operators on
/// a finite-dimensional space (one dimension per atom).  All arithmetic is
/// exact rational, so returned moments carry no truncation error.
class MomentOracle {
public:
    using rat = boost::multiprecision::cpp_rational;

    explicit MomentOracle(std::vector<PlanarMeasure> pairs, int word_cap = 8)
        : cap_(word_cap) {
        for (const auto& eta : pairs) {
            if (!eta.grid().empty())
                throw Error("MomentOracle: inputs must be purely atomic");
            Rep rep;
            for (const auto& a : eta.atoms()) {
                rep.x.push_back(rat(a.x));
                rep.y.push_back(rat(a.y));
                rep.p.push_back(rat(a.mass));
            }
            rep.n = static_cast<int>(rep.x.size());
            reps_.push_back(std::move(rep));
        }
    }

    /// Vacuum expectation of the operator word, applied rightmost factor
    /// first: left faces act through the left representation, right faces
    /// through the right representation.
    rat expectation(const std::vector<WordLetter>& word) const {
        if (static_cast<int>(word.size()) > cap_)
            throw CapExceeded("MomentOracle: word length exceeds the configured cap");
        State state;
        state[Basis{}] = 1;  // vacuum
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
            const auto& rep = reps_.at(static_cast<std::size_t>(it->pair));
            const auto& diag = it->face == Face::left ? rep.x : rep.y;
            state = it->face == Face::left ? apply_left(state, it->pair, rep, diag)
                                           : apply_right(state, it->pair, rep, diag);
        }
        auto found = state.find(Basis{});
        return found == state.end() ? rat(0) : found->second;
    }

    double moment(const std::vector<WordLetter>& word) const {
        return static_cast<double>(expectation(word));
    }

    /// phi((a_1+...+a_P)^j (b_1+...+b_P)^k): the band moment of the sum
    /// pair, expanded into 2^(j+k) elementary words (for P = 2).
    rat convolved_band_moment(int j, int k) const {
        const int p = static_cast<int>(reps_.size());
        std::vector<WordLetter> word(static_cast<std::size_t>(j + k));
        rat total = 0;
        // Mixed-radix enumeration over pair choices per slot.
        std::vector<int> choice(static_cast<std::size_t>(j + k), 0);
        while (true) {
            for (int s = 0; s < j + k; ++s)
                word[static_cast<std::size_t>(s)] = {choice[static_cast<std::size_t>(s)],
                                                     s < j ? Face::left : Face::right};
            total += expectation(word);
            int s = 0;
            while (s < j + k && ++choice[static_cast<std::size_t>(s)] == p) {
                choice[static_cast<std::size_t>(s)] = 0;
                ++s;
            }
            if (s == j + k) break;
        }
        return total;
    }

private:
    struct Rep {
        int n = 0;
        std::vector<rat> x, y, p;
    };

    // A basis tensor: alternating word of (pair index, kernel-basis slot).
    using Basis = std::vector<std::pair<int, int>>;
    using State = std::map<Basis, rat>;

    // Decomposition of T xi_j = s xi_j + sum_i c_i f_i with kernel basis
    // f_i = e_i - (p_i/p_n) e_n.
    static void decompose_xi(const Rep& rep, const std::vector<rat>& diag, rat& s,
                             std::vector<rat>& c) {
        s = 0;
        for (int i = 0; i < rep.n; ++i) s += rep.p[static_cast<std::size_t>(i)] * diag[static_cast<std::size_t>(i)];
        c.assign(static_cast<std::size_t>(rep.n - 1), rat(0));
        for (int i = 0; i + 1 < rep.n; ++i) c[static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)] - s;
    }

    // Decomposition of T f_m: e-coordinates are t_m at m and
    // -(p_m/p_n) t_n at n.
    static void decompose_kernel(const Rep& rep, const std::vector<rat>& diag, int m, rat& s,
                                 std::vector<rat>& c) {
        const std::size_t last = static_cast<std::size_t>(rep.n - 1);
        rat tm = diag[static_cast<std::size_t>(m)];
        rat tn = diag[last];
        s = rep.p[static_cast<std::size_t>(m)] * (tm - tn);
        c.assign(static_cast<std::size_t>(rep.n - 1), rat(0));
        c[static_cast<std::size_t>(m)] = tm - s;
        for (int i = 0; i + 1 < rep.n; ++i)
            if (i != m) c[static_cast<std::size_t>(i)] = -s;
    }

    static void add(State& st, Basis b, const rat& v) {
        if (v == 0) return;
        st[std::move(b)] += v;
    }

    State apply_left(const State& st, int j, const Rep& rep, const std::vector<rat>& diag) const {
        State out;
        rat s;
        std::vector<rat> c;
        for (const auto& [basis, coeff] : st) {
            if (!basis.empty() && basis.front().first == j) {
                decompose_kernel(rep, diag, basis.front().second, s, c);
                Basis rest(basis.begin() + 1, basis.end());
                add(out, rest, coeff * s);
                for (int i = 0; i + 1 < rep.n; ++i) {
                    if (c[static_cast<std::size_t>(i)] == 0) continue;
                    Basis b = basis;
                    b.front().second = i;
                    add(out, std::move(b), coeff * c[static_cast<std::size_t>(i)]);
                }
            } else {
                decompose_xi(rep, diag, s, c);
                add(out, basis, coeff * s);
                for (int i = 0; i + 1 < rep.n; ++i) {
                    if (c[static_cast<std::size_t>(i)] == 0) continue;
                    Basis b;
                    b.reserve(basis.size() + 1);
                    b.emplace_back(j, i);
                    b.insert(b.end(), basis.begin(), basis.end());
                    add(out, std::move(b), coeff * c[static_cast<std::size_t>(i)]);
                }
            }
        }
        return out;
    }

    State apply_right(const State& st, int j, const Rep& rep, const std::vector<rat>& diag) const {
        State out;
        rat s;
        std::vector<rat> c;
        for (const auto& [basis, coeff] : st) {
            if (!basis.empty() && basis.back().first == j) {
                decompose_kernel(rep, diag, basis.back().second, s, c);
                Basis rest(basis.begin(), basis.end() - 1);
                add(out, rest, coeff * s);
                for (int i = 0; i + 1 < rep.n; ++i) {
                    if (c[static_cast<std::size_t>(i)] == 0) continue;
                    Basis b = basis;
                    b.back().second = i;
                    add(out, std::move(b), coeff * c[static_cast<std::size_t>(i)]);
                }
            } else {
                decompose_xi(rep, diag, s, c);
                add(out, basis, coeff * s);
                for (int i = 0; i + 1 < rep.n; ++i) {
                    if (c[static_cast<std::size_t>(i)] == 0) continue;
                    Basis b = basis;
                    b.emplace_back(j, i);
                    add(out, std::move(b), coeff * c[static_cast<std::size_t>(i)]);
                }
            }
        }
        return out;
    }

    int cap_;
    std::vector<Rep> reps_;
};

/// Convenience wrapper matching the word-expectation entry point.
inline double universal_moment_oracle(const std::vector<PlanarMeasure>& pairs,
                                      const std::vector<WordLetter>& word, int word_cap = 8) {
    return MomentOracle(pairs, word_cap).moment(word);
}

} // namespace bifree
