// fock.hpp - finite-mode, occupancy-truncated second quantization
//
// Operators are written once as polynomial symbols in the mode amplitudes
// (coefficient * prod conj(z_c) * prod z_a). The quantum operator is the
// normal-ordered (Wick) quantization with ladders scaled so [a, a*] = eps;
// the classical dynamics is the Hamiltonian flow of the same symbol.
#pragma once

#include "polaron/form_factors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace polaron::fock {

using cplx = std::complex<double>;
using IVec = std::array<int, 3>;
using Occupation = std::vector<int>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline IVec operator+(IVec a, const IVec& b) {
    for (int i = 0; i < 3; ++i) a[i] += b[i];
    return a;
}
inline IVec operator-(IVec a, const IVec& b) {
    for (int i = 0; i < 3; ++i) a[i] -= b[i];
    return a;
}
inline int dot(const IVec& a, const IVec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline constexpr Eigen::Index max_dense_dim = 5000;

struct DimensionOverflow : std::length_error {
    using std::length_error::length_error;
};
struct TruncationOverflow : std::domain_error {
    using std::domain_error::domain_error;
};

// Plane-wave particle modes and phonon modes on a periodic box of side L;
// momenta are integer vectors in units of 2 pi / L.
struct FockModel {
    int dim = 1;
    double length = two_pi;
    std::vector<IVec> particle_modes;
    std::vector<IVec> phonon_modes;
    int particle_max = 6;
    int phonon_max = 6;
    double eps = 0.25;
    CutoffProfile profile{1, 0.5, no_cutoff};

    int particle_count() const { return static_cast<int>(particle_modes.size()); }
    int phonon_count() const { return static_cast<int>(phonon_modes.size()); }
    int mode_count() const { return particle_count() + phonon_count(); }
    int phonon_slot(int j) const { return particle_count() + j; }

    double kappa() const { return two_pi / length; }
    double dk() const { return std::pow(kappa(), dim); }
    double kabs(const IVec& m) const { return kappa() * std::sqrt(double(dot(m, m))); }

    std::optional<int> particle_at(const IVec& m) const {
        const auto it = std::find(particle_modes.begin(), particle_modes.end(), m);
        if (it == particle_modes.end()) return std::nullopt;
        return static_cast<int>(it - particle_modes.begin());
    }

    IVec momentum(const Occupation& occ) const {
        IVec p{0, 0, 0};
        for (int i = 0; i < particle_count(); ++i)
            for (int a = 0; a < 3; ++a) p[a] += occ[i] * particle_modes[i][a];
        for (int j = 0; j < phonon_count(); ++j)
            for (int a = 0; a < 3; ++a) p[a] += occ[phonon_slot(j)] * phonon_modes[j][a];
        return p;
    }
    int particles(const Occupation& occ) const {
        int s = 0;
        for (int i = 0; i < particle_count(); ++i) s += occ[i];
        return s;
    }
    int phonons(const Occupation& occ) const {
        int s = 0;
        for (int j = 0; j < phonon_count(); ++j) s += occ[phonon_slot(j)];
        return s;
    }
};

// Indexed set of occupation tuples.
class Basis {
public:
    Basis() = default;
    explicit Basis(std::vector<Occupation> states) : states_(std::move(states)) {
        for (std::size_t i = 0; i < states_.size(); ++i) index_[states_[i]] = static_cast<Eigen::Index>(i);
    }
    Eigen::Index size() const { return static_cast<Eigen::Index>(states_.size()); }
    const Occupation& operator[](Eigen::Index i) const { return states_[static_cast<std::size_t>(i)]; }
    std::optional<Eigen::Index> find(const Occupation& o) const {
        const auto it = index_.find(o);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    const std::vector<Occupation>& states() const { return states_; }

private:
    std::vector<Occupation> states_;
    std::map<Occupation, Eigen::Index> index_;
};

namespace detail {

// All tuples of length `modes` with sum == total (exact) or <= total.
inline void tuples(int modes, int total, bool exact, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(modes, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == modes) {
            if (!exact || left == 0) out.push_back(cur);
            return;
        }
        for (int n = 0; n <= left; ++n) {
            cur[pos] = n;
            self(self, pos + 1, left - n);
        }
        cur[pos] = 0;
    };
    rec(rec, 0, total);
}

}  // namespace detail

// States with exactly n particles and at most phonon_max phonons, split into
// blocks of equal total momentum. Every operator built here conserves both.
inline std::vector<Basis> momentum_blocks(const FockModel& m, int n) {
    std::vector<std::vector<int>> ps, fs;
    detail::tuples(m.particle_count(), n, true, ps);
    detail::tuples(m.phonon_count(), m.phonon_max, false, fs);
    std::map<IVec, std::vector<Occupation>> groups;
    for (const auto& p : ps)
        for (const auto& f : fs) {
            Occupation o(p);
            o.insert(o.end(), f.begin(), f.end());
            groups[m.momentum(o)].push_back(std::move(o));
        }
    std::vector<Basis> out;
    for (auto& [k, states] : groups) out.emplace_back(std::move(states));
    return out;
}

// Whole truncated space, particle number up to particle_max.
inline Basis full_basis(const FockModel& m) {
    std::vector<std::vector<int>> ps, fs;
    detail::tuples(m.particle_count(), m.particle_max, false, ps);
    detail::tuples(m.phonon_count(), m.phonon_max, false, fs);
    std::vector<Occupation> states;
    for (const auto& p : ps)
        for (const auto& f : fs) {
            Occupation o(p);
            o.insert(o.end(), f.begin(), f.end());
            states.push_back(std::move(o));
        }
    return Basis(std::move(states));
}

// ---------------------------------------------------------------- symbols

struct Monomial {
    cplx coef;
    std::vector<int> create;
    std::vector<int> annihilate;
};
using Polynomial = std::vector<Monomial>;

inline Polynomial& operator+=(Polynomial& a, const Polynomial& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline cplx symbol_value(const Polynomial& p, const Vector& z) {
    cplx s = 0.0;
    for (const auto& t : p) {
        cplx v = t.coef;
        for (int c : t.create) v *= std::conj(z(c));
        for (int a : t.annihilate) v *= z(a);
        s += v;
    }
    return s;
}

// d/d conj(z_j) of the symbol, for the flow i dz/dt = grad.
inline Vector symbol_gradient(const Polynomial& p, const Vector& z) {
    Vector g = Vector::Zero(z.size());
    for (const auto& t : p) {
        cplx ann = t.coef;
        for (int a : t.annihilate) ann *= z(a);
        for (std::size_t i = 0; i < t.create.size(); ++i) {
            cplx v = ann;
            for (std::size_t j = 0; j < t.create.size(); ++j)
                if (j != i) v *= std::conj(z(t.create[j]));
            g(t.create[i]) += v;
        }
    }
    return g;
}

// sum |p|^2 psi*_p psi_p + sum a*_q a_q
inline Polynomial free_symbol(const FockModel& m) {
    Polynomial out;
    const double k2 = m.kappa() * m.kappa();
    for (int i = 0; i < m.particle_count(); ++i) {
        const auto& p = m.particle_modes[i];
        out.push_back({k2 * dot(p, p), {i}, {i}});
    }
    for (int j = 0; j < m.phonon_count(); ++j) out.push_back({1.0, {m.phonon_slot(j)}, {m.phonon_slot(j)}});
    return out;
}

// sum_{q,p} w_q a*_q psi*_p psi_{p+q} + conj(w_q) psi*_{p+q} psi_p a_q
inline Polynomial emission_symbol(const FockModel& m, const std::vector<cplx>& weight) {
    Polynomial out;
    for (int j = 0; j < m.phonon_count(); ++j) {
        if (weight[j] == 0.0) continue;
        for (int i = 0; i < m.particle_count(); ++i) {
            const auto k = m.particle_at(m.particle_modes[i] + m.phonon_modes[j]);
            if (!k) continue;
            out.push_back({weight[j], {m.phonon_slot(j), i}, {*k}});
            out.push_back({std::conj(weight[j]), {*k}, {i, m.phonon_slot(j)}});
        }
    }
    return out;
}

inline std::vector<double> phonon_table(const FockModel& m, auto&& profile) {
    std::vector<double> v;
    for (const auto& q : m.phonon_modes) v.push_back(std::sqrt(m.dk()) * profile(m.kabs(q)));
    return v;
}

inline std::vector<cplx> as_complex(const std::vector<double>& v, cplx factor = 1.0) {
    std::vector<cplx> out;
    for (double x : v) out.push_back(factor * x);
    return out;
}

// Undressed Hamiltonian: free part plus emission/absorption with weight sqrt(dk) f(q).
inline Polynomial hamiltonian_symbol(const FockModel& m) {
    Polynomial out = free_symbol(m);
    out += emission_symbol(m, as_complex(phonon_table(m, [&](double k) { return m.profile.coupling(k); })));
    return out;
}

// Dressing generator with weight i sqrt(dk) B(q).
inline Polynomial generator_symbol(const FockModel& m) {
    const auto b = phonon_table(m, [&](double k) { return m.profile.generator(k); });
    return emission_symbol(m, as_complex(b, cplx(0.0, 1.0)));
}

// Number-operator coefficient left over after normal ordering the dressed
// Hamiltonian: sum_q dk (B^2 + 2 B f + |q|^2 B^2), times eps.
inline double dressed_number_shift(const FockModel& m) {
    double c = 0.0;
    for (const auto& q : m.phonon_modes) {
        const double k = m.kabs(q);
        const double b = m.profile.generator(k);
        c += m.dk() * (m.profile.pair_symbol(k) + k * k * b * b);
    }
    return m.eps * c;
}

// Term-by-term dressed Hamiltonian: free part, infrared emission, pair
// potential, quadratic phonon field term, drift term and number shift.
inline Polynomial dressed_symbol(const FockModel& m) {
    Polynomial out = free_symbol(m);
    out += emission_symbol(m, as_complex(phonon_table(m, [&](double k) { return m.profile.coupling_ir(k); })));

    const double k2 = m.kappa() * m.kappa();
    const auto b = phonon_table(m, [&](double k) { return m.profile.generator(k); });
    const int np = m.particle_count();
    const int nq = m.phonon_count();

    // sum_q S(q) dk psi*_{p1} psi*_{p2} psi_{p2-q} psi_{p1+q}
    for (int j = 0; j < nq; ++j) {
        const auto& q = m.phonon_modes[j];
        const double s = m.dk() * m.profile.pair_symbol(m.kabs(q));
        if (s == 0.0) continue;
        for (int i1 = 0; i1 < np; ++i1)
            for (int i2 = 0; i2 < np; ++i2) {
                const auto j1 = m.particle_at(m.particle_modes[i1] + q);
                const auto j2 = m.particle_at(m.particle_modes[i2] - q);
                if (j1 && j2) out.push_back({s, {i1, i2}, {*j2, *j1}});
            }
    }
    // (q.q') b b' [a*_q a*_q' rho(q+q') + h.c. + 2 a*_q a_q' rho(q-q')],
    // rho(k) = sum_p psi*_p psi_{p+k}
    for (int ja = 0; ja < nq; ++ja)
        for (int jb = 0; jb < nq; ++jb) {
            const auto& q = m.phonon_modes[ja];
            const auto& qq = m.phonon_modes[jb];
            const double c = k2 * dot(q, qq) * b[ja] * b[jb];
            if (c == 0.0) continue;
            const int sa = m.phonon_slot(ja), sb = m.phonon_slot(jb);
            for (int i = 0; i < np; ++i) {
                const auto& p = m.particle_modes[i];
                if (const auto k = m.particle_at(p + q + qq)) {
                    out.push_back({c, {sa, sb, i}, {*k}});
                    out.push_back({c, {*k}, {sa, sb, i}});
                }
                if (const auto k = m.particle_at(p + q - qq)) out.push_back({2.0 * c, {sa, i}, {sb, *k}});
            }
        }
    // -2 b_q [(p+q).q psi*_{p+q} a_q psi_p + (q.p) a*_q psi*_{p-q} psi_p]
    for (int j = 0; j < nq; ++j) {
        if (b[j] == 0.0) continue;
        const auto& q = m.phonon_modes[j];
        const int s = m.phonon_slot(j);
        for (int i = 0; i < np; ++i) {
            const auto& p = m.particle_modes[i];
            if (const auto k = m.particle_at(p + q))
                out.push_back({-2.0 * b[j] * k2 * dot(p + q, q), {*k}, {s, i}});
            if (const auto k = m.particle_at(p - q))
                out.push_back({-2.0 * b[j] * k2 * dot(q, p), {s, *k}, {i}});
        }
    }
    const double shift = dressed_number_shift(m);
    if (shift != 0.0)
        for (int i = 0; i < np; ++i) out.push_back({shift, {i}, {i}});
    return out;
}

// ---------------------------------------------------------------- operators

struct OperatorMatrix {
    Matrix matrix;
    bool hermitian = false;

    Eigen::Index dim() const { return matrix.rows(); }
    double hermiticity_defect() const { return (matrix - matrix.adjoint()).norm(); }
};

// Wick quantization on a basis; transitions leaving the basis are dropped.
inline OperatorMatrix quantize(const Polynomial& p, const Basis& basis, double eps, bool hermitian = true) {
    if (basis.size() > max_dense_dim) throw DimensionOverflow("basis too large for dense operators");
    OperatorMatrix op{Matrix::Zero(basis.size(), basis.size()), hermitian};
    Occupation work;
    for (Eigen::Index col = 0; col < basis.size(); ++col) {
        for (const auto& t : p) {
            work = basis[col];
            cplx amp = t.coef;
            bool alive = true;
            for (int a : t.annihilate) {
                if (work[a] == 0) {
                    alive = false;
                    break;
                }
                amp *= std::sqrt(eps * work[a]);
                --work[a];
            }
            if (!alive) continue;
            for (int c : t.create) {
                ++work[c];
                amp *= std::sqrt(eps * work[c]);
            }
            if (const auto row = basis.find(work)) op.matrix(*row, col) += amp;
        }
    }
    if (hermitian && op.hermiticity_defect() > 1e-10 * (1.0 + op.matrix.norm()))
        throw std::logic_error("symbol does not quantize to a hermitian matrix");
    return op;
}

inline OperatorMatrix annihilation(const Basis& basis, int mode, double eps) {
    return quantize({{1.0, {}, {mode}}}, basis, eps, false);
}

inline OperatorMatrix number_operator(const FockModel& m, const Basis& basis, bool particles) {
    Polynomial p;
    if (particles)
        for (int i = 0; i < m.particle_count(); ++i) p.push_back({1.0, {i}, {i}});
    else
        for (int j = 0; j < m.phonon_count(); ++j) p.push_back({1.0, {m.phonon_slot(j)}, {m.phonon_slot(j)}});
    return quantize(p, basis, m.eps);
}

inline OperatorMatrix build_hamiltonian(const FockModel& m, const Basis& basis) {
    return quantize(hamiltonian_symbol(m), basis, m.eps);
}
inline OperatorMatrix build_generator(const FockModel& m, const Basis& basis) {
    return quantize(generator_symbol(m), basis, m.eps);
}
inline OperatorMatrix build_dressed(const FockModel& m, const Basis& basis) {
    return quantize(dressed_symbol(m), basis, m.eps);
}

// exp(i T / eps) by scaling and squaring with Pade approximants.
inline Matrix dressing_unitary(const OperatorMatrix& generator, double eps) {
    const Matrix arg = cplx(0.0, 1.0 / eps) * generator.matrix;
    return arg.exp();
}

// U H U*
inline OperatorMatrix dress_hamiltonian(const OperatorMatrix& h, const Matrix& unitary) {
    return {unitary * h.matrix * unitary.adjoint(), true};
}

// Weyl operator exp(i (a(f) + a*(f)) / sqrt 2), a(f) = sum conj(f_j) a_j.
inline Matrix weyl(const Basis& basis, const Vector& f, double eps) {
    Matrix field = Matrix::Zero(basis.size(), basis.size());
    for (Eigen::Index j = 0; j < f.size(); ++j) {
        if (f(j) == 0.0) continue;
        const Matrix a = annihilation(basis, static_cast<int>(j), eps).matrix;
        field += std::conj(f(j)) * a + f(j) * a.adjoint();
    }
    const Matrix arg = cplx(0.0, 1.0 / std::sqrt(2.0)) * field;
    return arg.exp();
}

// ---------------------------------------------------------------- states

inline void check_margin(const FockModel& m, const Vector& z) {
    double np = 0.0, nf = 0.0;
    for (int i = 0; i < m.particle_count(); ++i) np += std::norm(z(i));
    for (int j = 0; j < m.phonon_count(); ++j) nf += std::norm(z(m.phonon_slot(j)));
    if (np / m.eps > m.particle_max / 3.0 || nf / m.eps > m.phonon_max / 3.0)
        throw TruncationOverflow("coherent state too close to the occupancy cutoff");
}

// Product of coherent-state amplitudes e^{-|w|^2/2} w^n / sqrt(n!), w = z / sqrt(eps),
// evaluated on the basis without normalization.
inline Vector coherent_amplitudes(const FockModel& m, const Basis& basis, const Vector& z) {
    Vector v(basis.size());
    for (Eigen::Index s = 0; s < basis.size(); ++s) {
        cplx amp = 1.0;
        for (int j = 0; j < m.mode_count(); ++j) {
            const cplx w = z(j) / std::sqrt(m.eps);
            const int n = basis[s][j];
            amp *= std::exp(-0.5 * std::norm(w)) * std::pow(w, n) / std::sqrt(std::tgamma(n + 1.0));
        }
        v(s) = amp;
    }
    return v;
}

// Truncated, renormalized product of coherent states with a_j |z> ~ z_j |z>.
inline Vector coherent_state(const FockModel& m, const Basis& basis, const Vector& z) {
    if (z.size() != m.mode_count()) throw std::invalid_argument("amplitude vector does not match modes");
    check_margin(m, z);
    const Vector v = coherent_amplitudes(m, basis, z);
    return v / v.norm();
}

// <v, a_j v> for every mode, without forming matrices.
inline Vector mode_expectations(const FockModel& m, const Basis& basis, const Vector& v) {
    Vector out = Vector::Zero(m.mode_count());
    Occupation work;
    for (Eigen::Index s = 0; s < basis.size(); ++s) {
        if (v(s) == 0.0) continue;
        for (int j = 0; j < m.mode_count(); ++j) {
            if (basis[s][j] == 0) continue;
            work = basis[s];
            --work[j];
            if (const auto r = basis.find(work)) out(j) += std::conj(v(*r)) * std::sqrt(m.eps * basis[s][j]) * v(s);
        }
    }
    return out;
}

// ---------------------------------------------------------------- checks

struct DressedOperatorReport {
    double max_difference = 0.0;   // on the sub-basis, operator norm
    double dressing_size = 0.0;    // ||U H U* - H|| on the sub-basis
    double max_unitarity_defect = 0.0;
    Eigen::Index largest_block = 0;
    int blocks = 0;
};

// Sub-basis where the expansion is compared: at most half the cutoff in each
// sector and every particle within `interior` (sup norm) of zero momentum.
inline bool in_sub_basis(const FockModel& m, const Occupation& o, int interior) {
    if (m.particles(o) > m.particle_max / 2 || m.phonons(o) > m.phonon_max / 2) return false;
    for (int i = 0; i < m.particle_count(); ++i) {
        if (o[i] == 0) continue;
        for (int a = 0; a < 3; ++a)
            if (std::abs(m.particle_modes[i][a]) > interior) return false;
    }
    return true;
}

inline double operator_norm(const Matrix& x) {
    if (x.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(x).singularValues()(0);
}

inline Matrix restrict(const Matrix& x, const std::vector<Eigen::Index>& sel) {
    Matrix out(sel.size(), sel.size());
    for (std::size_t r = 0; r < sel.size(); ++r)
        for (std::size_t c = 0; c < sel.size(); ++c) out(r, c) = x(sel[r], sel[c]);
    return out;
}

// Conjugated Hamiltonian versus the term-assembled one, sector by sector in
// particle number (0..particle_max/2) and total momentum.
inline DressedOperatorReport dressed_operator_check(const FockModel& m, int interior = 0) {
    DressedOperatorReport r;
    const Polynomial hs = hamiltonian_symbol(m);
    const Polynomial ts = generator_symbol(m);
    const Polynomial ds = dressed_symbol(m);
    for (int n = 0; n <= m.particle_max / 2; ++n) {
        for (const Basis& b : momentum_blocks(m, n)) {
            std::vector<Eigen::Index> sel;
            for (Eigen::Index i = 0; i < b.size(); ++i)
                if (in_sub_basis(m, b[i], interior)) sel.push_back(i);
            if (sel.empty()) continue;
            const OperatorMatrix h = quantize(hs, b, m.eps);
            const Matrix u = dressing_unitary(quantize(ts, b, m.eps), m.eps);
            const Matrix conj = u * h.matrix * u.adjoint();
            const Matrix assembled = quantize(ds, b, m.eps).matrix;
            r.max_difference = std::max(r.max_difference, operator_norm(restrict(conj - assembled, sel)));
            r.dressing_size = std::max(r.dressing_size, operator_norm(restrict(conj - h.matrix, sel)));
            r.max_unitarity_defect = std::max(
                r.max_unitarity_defect, (u * u.adjoint() - Matrix::Identity(b.size(), b.size())).norm());
            r.largest_block = std::max(r.largest_block, b.size());
            ++r.blocks;
        }
    }
    return r;
}

struct FormBoundReport {
    double a = 0.0;        // slope used
    double c = 0.0;        // smallest constant making a dominate every sample
    double worst_ratio = 0.0;  // max (|<H_I>| - c) / <H_0> at that constant
    int samples = 0;
};

// Random normalized states in the fixed particle-number sector n. For a given
// slope a, returns the smallest C with |<H_I>| <= a <H_0> + C on all samples.
inline FormBoundReport form_bound_check(const FockModel& m, int n, int samples, double a, std::uint64_t seed) {
    const auto blocks = momentum_blocks(m, n);
    const Polynomial h0 = free_symbol(m);
    Polynomial hi = dressed_symbol(m);
    for (auto t : h0) {
        t.coef = -t.coef;
        hi.push_back(t);
    }
    std::vector<Matrix> free_ops, int_ops;
    for (const auto& b : blocks) {
        free_ops.push_back(quantize(h0, b, m.eps).matrix);
        int_ops.push_back(quantize(hi, b, m.eps).matrix);
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    FormBoundReport r;
    r.a = a;
    std::vector<std::pair<double, double>> pts;
    for (int s = 0; s < samples; ++s) {
        double e0 = 0.0, ei = 0.0, norm2 = 0.0;
        std::vector<Vector> parts;
        for (const auto& b : blocks) {
            Vector v(b.size());
            for (Eigen::Index i = 0; i < b.size(); ++i) {
                const double re = normal(rng);
                const double im = normal(rng);
                v(i) = cplx(re, im);
            }
            norm2 += v.squaredNorm();
            parts.push_back(std::move(v));
        }
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            e0 += parts[k].dot(free_ops[k] * parts[k]).real();
            ei += parts[k].dot(int_ops[k] * parts[k]).real();
        }
        pts.emplace_back(e0 / norm2, std::abs(ei) / norm2);
    }
    for (const auto& [x, y] : pts) r.c = std::max(r.c, y - a * x);
    r.c = std::max(r.c, 0.0);
    for (const auto& [x, y] : pts)
        if (x > 0.0) r.worst_ratio = std::max(r.worst_ratio, (y - r.c) / x);
    r.samples = samples;
    return r;
}

// ---------------------------------------------------------------- dynamics

// i dz/dt = grad of the symbol, classical RK4 with fixed step.
inline Vector classical_flow(const Polynomial& h, const Vector& z0, double t, double dt) {
    const auto steps = std::max<long>(1, std::lround(t / dt));
    const double h_step = t / static_cast<double>(steps);
    const cplx mi(0.0, -1.0);
    auto rhs = [&](const Vector& z) -> Vector { return mi * symbol_gradient(h, z); };
    Vector z = z0;
    for (long s = 0; s < steps; ++s) {
        const Vector k1 = rhs(z);
        const Vector k2 = rhs(z + 0.5 * h_step * k1);
        const Vector k3 = rhs(z + 0.5 * h_step * k2);
        const Vector k4 = rhs(z + h_step * k3);
        z += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
}

// Spectral propagator e^{-itH/eps} for a Hamiltonian that conserves particle
// number and total momentum, diagonalized block by block.
class BlockPropagator {
public:
    BlockPropagator(const FockModel& m, const Polynomial& h) : model_(m) {
        for (int n = 0; n <= m.particle_max; ++n)
            for (auto& b : momentum_blocks(m, n)) {
                Eigen::SelfAdjointEigenSolver<Matrix> es(quantize(h, b, m.eps).matrix);
                values_.push_back(es.eigenvalues());
                vectors_.push_back(es.eigenvectors());
                for (Eigen::Index i = 0; i < b.size(); ++i) where_[b[i]] = {blocks_.size(), i};
                blocks_.push_back(std::move(b));
            }
    }

    const std::vector<Basis>& blocks() const { return blocks_; }

    // Normalized truncated coherent state, split by block.
    std::vector<Vector> coherent(const Vector& z) const {
        check_margin(model_, z);
        std::vector<Vector> out;
        double n2 = 0.0;
        for (const auto& b : blocks_) {
            out.push_back(coherent_amplitudes(model_, b, z));
            n2 += out.back().squaredNorm();
        }
        for (auto& v : out) v /= std::sqrt(n2);
        return out;
    }

    std::vector<Vector> propagate(const std::vector<Vector>& state, double t) const {
        std::vector<Vector> out;
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const Vector phase = (cplx(0.0, -t / model_.eps) * values_[k].cast<cplx>()).array().exp();
            out.push_back(vectors_[k] * (phase.asDiagonal() * (vectors_[k].adjoint() * state[k])));
        }
        return out;
    }

    // <state, a_j state> for every mode; a_j moves between blocks.
    Vector expectations(const std::vector<Vector>& state) const {
        Vector out = Vector::Zero(model_.mode_count());
        Occupation work;
        for (std::size_t k = 0; k < blocks_.size(); ++k)
            for (Eigen::Index s = 0; s < blocks_[k].size(); ++s) {
                const cplx amp = state[k](s);
                if (amp == 0.0) continue;
                for (int j = 0; j < model_.mode_count(); ++j) {
                    const int occ = blocks_[k][s][j];
                    if (occ == 0) continue;
                    work = blocks_[k][s];
                    --work[j];
                    const auto it = where_.find(work);
                    if (it == where_.end()) continue;
                    const auto [l, r] = it->second;
                    out(j) += std::conj(state[l](r)) * std::sqrt(model_.eps * occ) * amp;
                }
            }
        return out;
    }

    double norm(const std::vector<Vector>& state) const {
        double n2 = 0.0;
        for (const auto& v : state) n2 += v.squaredNorm();
        return std::sqrt(n2);
    }

private:
    FockModel model_;
    std::vector<Basis> blocks_;
    std::vector<Eigen::VectorXd> values_;
    std::vector<Matrix> vectors_;
    std::map<Occupation, std::pair<std::size_t, Eigen::Index>> where_;
};

struct CorrespondenceRow {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<double> errors;  // |<a>(t) - z(t)| over all modes
};

// Quantum mode expectations under e^{-itH/eps} from a coherent state versus the
// classical flow of the same symbol, for each eps.
inline std::vector<CorrespondenceRow> correspondence_experiment(FockModel m, const std::vector<double>& eps_list,
                                                                const Vector& z0, const std::vector<double>& times,
                                                                double classical_dt = 1e-4) {
    std::vector<CorrespondenceRow> table;
    const Polynomial h = hamiltonian_symbol(m);
    for (double eps : eps_list) {
        m.eps = eps;
        check_margin(m, z0);
        const BlockPropagator prop(m, h);
        const auto psi0 = prop.coherent(z0);
        CorrespondenceRow row;
        row.eps = eps;
        for (double t : times) {
            const Vector q = prop.expectations(prop.propagate(psi0, t));
            const Vector c = t == 0.0 ? z0 : classical_flow(h, z0, t, classical_dt);
            row.times.push_back(t);
            row.errors.push_back((q - c).norm());
        }
        table.push_back(std::move(row));
    }
    return table;
}

}  // namespace polaron::fock
