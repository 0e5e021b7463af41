#include "sbr/settler_kernels.hpp"

#include <algorithm>
#include <array>

namespace sbr::kernels {

namespace {

double solids_sum(const StepInputs& in, std::size_t j) noexcept {
    double x = 0.0;
    const double* c = in.C.data() + j * in.k_C;
    for (std::size_t k = 0; k < in.k_C; ++k) x += c[k];
    return x;
}

void interior_face(const StepInputs& in, std::size_t f, FaceCoefficients& out) noexcept {
    const SettlingModel& s = *in.settling;
    const double rho_X = s.params().rho_X;
    const double Xu = solids_sum(in, f - 1);
    const double Xl = solids_sum(in, f);
    const double A = in.face_area[f];
    // Compression mass flux, upward when positive.
    const double diff = A * (s.D_flux_unchecked(Xl) - s.D_flux_unchecked(Xu)) / in.dz;
    double a = in.Q_u;
    if (Xu > 0.0) {
        a += A * s.godunov_unchecked(Xu, Xl) / Xu;
        if (diff < 0.0) a -= diff / Xu;
    }
    const double b = (diff > 0.0 && Xl > 0.0) ? diff / Xl : 0.0;
    const double liquid = in.Q_u - (a * Xu - b * Xl) / rho_X;
    out.a[f] = a;
    out.b[f] = b;
    out.as[f] = liquid > 0.0 ? liquid / (1.0 - Xu / rho_X) : 0.0;
    out.bs[f] = liquid < 0.0 ? -liquid / (1.0 - Xl / rho_X) : 0.0;
}

void boundary_faces(const StepInputs& in, FaceCoefficients& out) noexcept {
    const std::size_t N = in.cells;
    out.a[in.top] = out.b[in.top] = out.as[in.top] = out.bs[in.top] = 0.0;
    out.a[N] = in.Q_u;
    out.as[N] = in.Q_u;
    out.b[N] = out.bs[N] = 0.0;
    out.extraction = {};
    if (in.Q_e > 0.0) {
        const SettlingModel& s = *in.settling;
        const double X = solids_sum(in, in.top);
        double dDdz = 0.0;
        if (in.top + 1 < N) dDdz = (s.D_unchecked(solids_sum(in, in.top + 1)) - s.D_unchecked(X)) / in.dz;
        out.extraction = surface_extraction(s, X, dDdz, in.surface_area, in.Q_e);
    }
}

double cell_rate(const StepInputs& in, const FaceCoefficients& fc, std::size_t j) noexcept {
    const SettlingModel& s = *in.settling;
    const std::size_t N = in.cells;
    const double X = solids_sum(in, j);
    double A_up = 0.0, A_dn = 0.0, d_up = 0.0, d_dn = 0.0;
    if (j > in.top) {
        const double Xa = solids_sum(in, j - 1);
        A_up = in.face_area[j];
        d_up = s.max_d_flux_on(std::min(X, Xa), std::max(X, Xa));
    }
    if (j + 1 < N) {
        const double Xb = solids_sum(in, j + 1);
        A_dn = in.face_area[j + 1];
        d_dn = s.max_d_flux_on(std::min(X, Xb), std::max(X, Xb));
    }
    const bool top = j == in.top;
    const double w = top ? in.top_volume_floor : in.volume[j];
    double out_C = in.Q_u + std::max(A_up, A_dn) * s.max_flux_slope() + (A_up * d_up + A_dn * d_dn) / in.dz;
    double out_S = fc.as[j + 1] + fc.bs[j];
    if (top) {
        out_C += fc.extraction.solids;
        out_S += fc.extraction.substrates;
    }

    double cons_C_max = 0.0, cons_S_max = 0.0;
    if (in.reactions->has_reactions()) {
        std::array<double, kMaxComponents> pc{}, cc{}, ps{}, cs{};
        const auto C = in.C.subspan(j * in.k_C, in.k_C);
        const auto S = in.S.subspan(j * in.k_S, in.k_S);
        in.reactions->split(C, S, {pc.data(), in.k_C}, {cc.data(), in.k_C}, {ps.data(), in.k_S},
                            {cs.data(), in.k_S});
        for (std::size_t k = 0; k < in.k_C; ++k) cons_C_max = std::max(cons_C_max, cc[k]);
        for (std::size_t k = 0; k < in.k_S; ++k) cons_S_max = std::max(cons_S_max, cs[k]);
    }
    return std::max(out_C / w + cons_C_max, out_S / w + cons_S_max);
}

void cell_update(const StepInputs& in, const FaceCoefficients& fc, double dt, std::size_t j,
                 StepOutputs& out) noexcept {
    const std::size_t N = in.cells, kc = in.k_C, ks = in.k_S;
    const bool top = j == in.top;
    const double w = in.volume[j];
    std::array<double, kMaxComponents> pc{}, cc{}, ps{}, cs{};
    const auto C = in.C.subspan(j * kc, kc);
    const auto S = in.S.subspan(j * ks, ks);
    if (in.reactions->has_reactions())
        in.reactions->split(C, S, {pc.data(), kc}, {cc.data(), kc}, {ps.data(), ks}, {cs.data(), ks});

    const double out_C = fc.a[j + 1] + fc.b[j] + (top ? fc.extraction.solids : 0.0);
    const double out_S = fc.as[j + 1] + fc.bs[j] + (top ? fc.extraction.substrates : 0.0);
    const double in_up_C = j > in.top ? fc.a[j] : 0.0;
    const double in_up_S = j > in.top ? fc.as[j] : 0.0;
    const double in_dn_C = j + 1 < N ? fc.b[j + 1] : 0.0;
    const double in_dn_S = j + 1 < N ? fc.bs[j + 1] : 0.0;
    bool negative = false;

    for (std::size_t k = 0; k < kc; ++k) {
        const double keep = w - dt * out_C - dt * w * cc[k];
        negative |= keep < 0.0;
        double gain = w * pc[k];
        if (in_up_C > 0.0) gain += in_up_C * in.C[(j - 1) * kc + k];
        if (in_dn_C > 0.0) gain += in_dn_C * in.C[(j + 1) * kc + k];
        if (top) gain += in.Q_f * in.C_f[k];
        out.mass_C[j * kc + k] = C[k] * keep + dt * gain;
        out.reacted[j * (kc + ks) + k] = dt * w * (pc[k] - cc[k] * C[k]);
    }
    for (std::size_t k = 0; k < ks; ++k) {
        const double keep = w - dt * out_S - dt * w * cs[k];
        negative |= keep < 0.0;
        double gain = w * ps[k];
        if (in_up_S > 0.0) gain += in_up_S * in.S[(j - 1) * ks + k];
        if (in_dn_S > 0.0) gain += in_dn_S * in.S[(j + 1) * ks + k];
        if (top) gain += in.Q_f * in.S_f[k];
        out.mass_S[j * ks + k] = S[k] * keep + dt * gain;
        out.reacted[j * (kc + ks) + kc + k] = dt * w * (ps[k] - cs[k] * S[k]);
    }
    out.negative_factor[j] = negative ? 1 : 0;
}

void clear_dry(const StepInputs& in, StepOutputs& out) noexcept {
    const std::size_t kc = in.k_C, ks = in.k_S;
    std::fill(out.mass_C.begin(), out.mass_C.begin() + in.top * kc, 0.0);
    std::fill(out.mass_S.begin(), out.mass_S.begin() + in.top * ks, 0.0);
    std::fill(out.reacted.begin(), out.reacted.begin() + in.top * (kc + ks), 0.0);
    std::fill(out.negative_factor.begin(), out.negative_factor.begin() + in.top, 0);
}

}  // namespace

void face_coefficients_serial(const StepInputs& in, FaceCoefficients& out) {
    out.resize(in.cells + 1);
    for (std::size_t f = in.top + 1; f < in.cells; ++f) interior_face(in, f, out);
    boundary_faces(in, out);
}

void face_coefficients_omp(const StepInputs& in, FaceCoefficients& out) {
    out.resize(in.cells + 1);
    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(in.top) + 1;
    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(in.cells);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t f = lo; f < hi; ++f) interior_face(in, static_cast<std::size_t>(f), out);
    boundary_faces(in, out);
}

void stability_rates_serial(const StepInputs& in, const FaceCoefficients& fc, std::span<double> rate) {
    std::fill(rate.begin(), rate.end(), 0.0);
    for (std::size_t j = in.top; j < in.cells; ++j) rate[j] = cell_rate(in, fc, j);
}

void stability_rates_omp(const StepInputs& in, const FaceCoefficients& fc, std::span<double> rate) {
    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(in.top);
    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(in.cells);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < hi; ++j)
        rate[j] = j < lo ? 0.0 : cell_rate(in, fc, static_cast<std::size_t>(j));
}

void update_masses_serial(const StepInputs& in, const FaceCoefficients& fc, double dt, StepOutputs& out) {
    out.resize(in.cells, in.k_C, in.k_S);
    clear_dry(in, out);
    for (std::size_t j = in.top; j < in.cells; ++j) cell_update(in, fc, dt, j, out);
}

void update_masses_omp(const StepInputs& in, const FaceCoefficients& fc, double dt, StepOutputs& out) {
    out.resize(in.cells, in.k_C, in.k_S);
    clear_dry(in, out);
    const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(in.top);
    const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(in.cells);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = lo; j < hi; ++j) cell_update(in, fc, dt, static_cast<std::size_t>(j), out);
}

}  // namespace sbr::kernels
