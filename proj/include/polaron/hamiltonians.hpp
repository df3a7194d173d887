// hamiltonians.hpp - undressed and dressed classical energies with Wirtinger gradients
#pragma once

#include "polaron/form_factors.hpp"
#include "polaron/phase_point.hpp"

#include <string_view>
#include <vector>

namespace polaron {

// Bit flags naming the summands of the two functionals.
namespace term {
inline constexpr unsigned kinetic = 1u << 0;
inline constexpr unsigned phonon = 1u << 1;
inline constexpr unsigned coupling = 1u << 2;       // int A_{alpha,f} |u|^2
inline constexpr unsigned ir_coupling = 1u << 3;    // same with the infrared part of f
inline constexpr unsigned pair = 1u << 4;           // int |u|^2 (V * |u|^2)
inline constexpr unsigned field_square = 1u << 5;   // int |A_{alpha,kB}|^2 |u|^2
inline constexpr unsigned drift = 1u << 6;          // first-order term in the momentum

inline constexpr unsigned free = kinetic | phonon;
inline constexpr unsigned undressed = free | coupling;
inline constexpr unsigned dressed = free | ir_coupling | pair | field_square | drift;
inline constexpr unsigned all = undressed | dressed;

inline std::string_view name(unsigned t) {
    switch (t) {
        case kinetic: return "kinetic";
        case phonon: return "phonon";
        case coupling: return "coupling";
        case ir_coupling: return "ir_coupling";
        case pair: return "pair";
        case field_square: return "field_square";
        case drift: return "drift";
        default: return "unknown";
    }
}
}  // namespace term

struct EnergyBreakdown {
    struct Part {
        unsigned term;
        double value;
    };
    double kinetic = 0.0;
    double phonon = 0.0;
    std::vector<Part> interaction;
    double total = 0.0;

    double value(unsigned mask) const {
        double s = 0.0;
        if (mask & term::kinetic) s += kinetic;
        if (mask & term::phonon) s += phonon;
        for (const auto& p : interaction)
            if (mask & p.term) s += p.value;
        return s;
    }
    double interaction_total() const { return value(term::all & ~term::free); }
};

// sum_k conj(alpha) g e^{-ik.x} dk
inline Field pairing_field(const Grid& g, const Field& alpha, const Field& profile) {
    g.check(alpha);
    return g.sum_forward(alpha.conjugate() * profile) * g.dk();
}

// A_{alpha,g}(x) = 2 Re sum_k conj(alpha) g e^{-ik.x} dk
inline RealField field_A(const Grid& g, const Field& alpha, const Field& profile) {
    return 2.0 * pairing_field(g, alpha, profile).real();
}
inline RealField field_A(const Grid& g, const Field& alpha, const RealField& profile) {
    return field_A(g, alpha, Field(profile.cast<cplx>()));
}
inline std::vector<RealField> field_A(const Grid& g, const Field& alpha,
                                      const std::vector<RealField>& profiles) {
    std::vector<RealField> out;
    for (const auto& p : profiles) out.push_back(field_A(g, alpha, p));
    return out;
}

// sum_x |u|^2 e^{-ik.x} dx
inline Field density_transform(const Grid& g, const Field& u) {
    return g.sum_forward(u.abs2().cast<cplx>()) * g.dx();
}

// -i d/dx_axis via the spectral multiplier k_axis.
inline Field momentum(const Grid& g, const Field& u, int axis) {
    return g.sum_backward(g.k(axis) * g.sum_forward(u)) / static_cast<double>(g.size());
}

inline Field laplacian_neg(const Grid& g, const Field& u) {
    return g.sum_backward(g.ksq() * g.sum_forward(u)) / static_cast<double>(g.size());
}

inline double kinetic_energy(const Grid& g, const Field& u) {
    return (g.ksq() * g.forward(u).abs2()).sum() * g.dk();
}

namespace detail {

inline void finish(EnergyBreakdown& e) { e.total = e.value(term::all); }

// Shared intermediate fields of the dressed functional.
struct DressedFields {
    RealField rho;
    Field rho_k;
    std::vector<Field> drift_coeff;  // a_j(x) = sum_k conj(alpha) k_j B e^{-ik.x} dk
    std::vector<RealField> field;    // 2 Re a_j
    RealField field_sq;
    std::vector<Field> du;           // D_j u

    DressedFields(const Grid& g, const FormFactors& ff, const PhasePoint& z, unsigned mask) {
        rho = z.u.abs2();
        if (mask & (term::ir_coupling | term::pair)) rho_k = density_transform(g, z.u);
        if (mask & (term::field_square | term::drift)) {
            field_sq = RealField::Zero(g.size());
            for (int a = 0; a < g.dim(); ++a) {
                drift_coeff.push_back(pairing_field(g, z.alpha, ff.k_generator[a].cast<cplx>()));
                field.push_back(2.0 * drift_coeff.back().real());
                field_sq += field.back().square();
            }
        }
        if (mask & term::drift) {
            const Field uk = g.sum_forward(z.u);
            const double inv = 1.0 / static_cast<double>(g.size());
            for (int a = 0; a < g.dim(); ++a) du.push_back(g.sum_backward(g.k(a) * uk) * inv);
        }
    }
};

inline RealField pair_field(const Grid& g, const FormFactors& ff, const Field& rho_k) {
    return g.sum_backward(ff.pair_symbol * rho_k).real() * g.dk();
}

}  // namespace detail

// h = |grad u|^2 + |alpha|^2 + int A_{alpha,f} |u|^2
inline EnergyBreakdown h_undressed(const Grid& g, const FormFactors& ff, const PhasePoint& z) {
    check(g, z);
    EnergyBreakdown e;
    e.kinetic = kinetic_energy(g, z.u);
    e.phonon = z.alpha.abs2().sum() * g.dk();
    const RealField a = field_A(g, z.alpha, ff.coupling);
    e.interaction.push_back({term::coupling, (a * z.u.abs2()).sum() * g.dx()});
    detail::finish(e);
    return e;
}

inline GradientPair grad_undressed(const Grid& g, const FormFactors& ff, const PhasePoint& z,
                                   unsigned mask = term::undressed) {
    check(g, z);
    GradientPair out{Field::Zero(g.size()), Field::Zero(g.size())};
    if (mask & term::kinetic) out.u += laplacian_neg(g, z.u);
    if (mask & term::phonon) out.alpha += z.alpha;
    if (mask & term::coupling) {
        out.u += field_A(g, z.alpha, ff.coupling) * z.u;
        out.alpha += ff.coupling * density_transform(g, z.u);
    }
    return out;
}

inline EnergyBreakdown h_dressed(const Grid& g, const FormFactors& ff, const PhasePoint& z) {
    check(g, z);
    EnergyBreakdown e;
    e.kinetic = kinetic_energy(g, z.u);
    e.phonon = z.alpha.abs2().sum() * g.dk();
    const detail::DressedFields w(g, ff, z, term::dressed);
    const double dx = g.dx();

    const RealField a_ir = field_A(g, z.alpha, ff.coupling_ir);
    e.interaction.push_back({term::ir_coupling, (a_ir * w.rho).sum() * dx});
    e.interaction.push_back(
        {term::pair, (detail::pair_field(g, ff, w.rho_k) * w.rho).sum() * dx});
    e.interaction.push_back({term::field_square, (w.field_sq * w.rho).sum() * dx});
    cplx d = 0.0;
    for (int a = 0; a < g.dim(); ++a) d += (z.u.conjugate() * w.drift_coeff[a] * w.du[a]).sum();
    e.interaction.push_back({term::drift, -4.0 * d.real() * dx});
    detail::finish(e);
    return e;
}

inline GradientPair grad_dressed(const Grid& g, const FormFactors& ff, const PhasePoint& z,
                                 unsigned mask = term::dressed) {
    check(g, z);
    GradientPair out{Field::Zero(g.size()), Field::Zero(g.size())};
    if (mask & term::kinetic) out.u += laplacian_neg(g, z.u);
    if (mask & term::phonon) out.alpha += z.alpha;
    if (!(mask & (term::ir_coupling | term::pair | term::field_square | term::drift))) return out;

    const detail::DressedFields w(g, ff, z, mask);
    const double inv = 1.0 / static_cast<double>(g.size());
    if (mask & term::ir_coupling) {
        out.u += field_A(g, z.alpha, ff.coupling_ir) * z.u;
        out.alpha += ff.coupling_ir * w.rho_k;
    }
    if (mask & term::pair) out.u += 2.0 * detail::pair_field(g, ff, w.rho_k) * z.u;
    if (mask & term::field_square) out.u += w.field_sq * z.u;
    if (mask & term::drift) {
        Field sym = Field::Zero(g.size());
        Field lead = Field::Zero(g.size());
        for (int a = 0; a < g.dim(); ++a) {
            lead += w.drift_coeff[a] * w.du[a];
            sym += g.k(a) * g.sum_forward(w.drift_coeff[a].conjugate() * z.u);
        }
        out.u -= 2.0 * (lead + g.sum_backward(sym) * inv);
    }
    if (mask & (term::field_square | term::drift)) {
        for (int a = 0; a < g.dim(); ++a) {
            Field src = Field::Zero(g.size());
            if (mask & term::field_square) src += 2.0 * w.rho * w.field[a];
            if (mask & term::drift) src -= 2.0 * z.u.conjugate() * w.du[a];
            out.alpha += ff.k_generator[a] * g.sum_forward(src) * g.dx();
        }
    }
    return out;
}

}  // namespace polaron
