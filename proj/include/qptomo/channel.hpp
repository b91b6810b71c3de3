#pragma once

#include <string>
#include <vector>

#include "qptomo/qform.hpp"
#include "qptomo/types.hpp"

namespace qptomo {

// Block view of a two-sided form over k+k modes: index a runs over the
// reference side, b over the channel-output side.
struct ChoiBlocks {
    int k = 0;
    double c0 = 0.0;
    Vec Gamma_a, Gamma_b;
    Mat X_aa, X_ab, X_bb;
    Mat Y_aa, Y_ab, Y_bb;
};

// Decompose a partitioned form into blocks / rebuild the form from blocks.
// split throws InvalidForm when the form carries no partition.
ChoiBlocks split_choi(const GaussianQForm& form);
GaussianQForm assemble_choi(const ChoiBlocks& blocks);

// Two-sided forms of standard single- and k-mode channels.
GaussianQForm identity_choi_form(int k = 1);
// Pure loss: transmitted amplitude cos(theta).
GaussianQForm beamsplitter_choi_form(double theta);
// Additive classical (thermal) noise with mean photon number nbar >= 0:
// a coherent input alpha comes out as a displaced thermal state at alpha.
GaussianQForm thermal_noise_choi_form(double nbar);
// Deterministic phase rotation by phi.
GaussianQForm phase_shift_choi_form(double phi);

// One coherent-probe measurement outcome, holding everything a heterodyne
// scan of the output state determines: the output form's linear coefficient
// d, constant c, and quadratic blocks.
struct ProbeRecord {
    Vec alpha;
    Vec d;
    double c = 0.0;
    Mat X_bb;
    Mat Y_bb;
};

struct ProbeOutput {
    GaussianQForm form;  // unnormalized output-state form over the b modes
    ProbeRecord record;
};

// Push the coherent probe |alpha> through the channel described by a
// two-sided form: substitute the probe into the a-side variables and read
// off the resulting form over the b modes.
ProbeOutput simulate_probe(const GaussianQForm& choi_form, const Vec& alpha);

// Normalized output-state form for a coherent input.
GaussianQForm predict_coherent(const GaussianQForm& choi_form,
                               const Vec& alpha);
GaussianQForm predict_coherent(const ProbeRecord& record);

// Two-sided form produced by sending one arm of a two-mode squeezed state
// with amplitude ratio q (0 < q < 1) per mode pair through the channel.
GaussianQForm tmss_output_form(const GaussianQForm& choi_form, double q);

// Scale factor relating the entangled-probe form evaluated at the mapped
// point conj(alpha)/q to the direct coherent-probe output:
//   N_q(alpha) = exp(-|alpha|^2 (1 - 1/q^2) / 2) / sqrt(1 - q^2).
// The k-mode version multiplies one such factor per mode pair.
double nq_factor(const Vec& alpha, double q);
double nq_factor(cxd alpha, double q);

enum class ChannelKind { Identity, BeamSplitter, ThermalNoise, PhaseShift, Gaussian };

// A named channel plus its two-sided form.  Named kinds carry the defining
// parameter so the form can be rebuilt (and cross-checked numerically);
// Gaussian means "given directly as a form".
struct GaussianChannelSpec {
    ChannelKind kind = ChannelKind::Gaussian;
    double param = 0.0;
    int k = 1;
    std::string label;
    GaussianQForm choi;
};

// Standard channel constructors.
GaussianChannelSpec identity_channel(int k = 1);
GaussianChannelSpec bs_channel(double theta);
GaussianChannelSpec thermal_noise_channel(double nbar);
GaussianChannelSpec phase_channel(double phi);
// Generic dispatch used by the serialization layer; param is k for the
// identity kind, the angle/photon-number otherwise.
GaussianChannelSpec make_channel_spec(ChannelKind kind, double param);

// Conveniences operating on a spec's form directly.
ProbeOutput simulate_probe(const GaussianChannelSpec& spec, const Vec& alpha);
GaussianQForm predict_coherent(const GaussianChannelSpec& spec,
                               const Vec& alpha);
GaussianQForm tmss_output_form(const GaussianChannelSpec& spec, double q);

}  // namespace qptomo
