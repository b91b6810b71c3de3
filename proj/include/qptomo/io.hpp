#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qptomo/channel.hpp"
#include "qptomo/tomo.hpp"
#include "qptomo/types.hpp"

namespace qptomo {

using nlohmann::json;

// All complex numbers serialize as [re, im]; matrices as nested row arrays.
// Every *_from_json throws ParseError (with the offending field named) on a
// shape or type violation rather than leaking library-level exceptions.

json complex_to_json(cxd z);
cxd complex_from_json(const json& j);
json vector_to_json(const Vec& v);
Vec vector_from_json(const json& j);
json matrix_to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json qform_to_json(const GaussianQForm& form);
GaussianQForm qform_from_json(const json& j);

// Channel files: {"kind": "identity"|"bs"|"thermal"|"phase"|"gaussian", ...}.
// Named kinds carry their defining parameter (theta / nbar / phi, plus k for
// identity) and are rebuilt from it on load; kind "gaussian" embeds the form
// under "choi".  Saving always embeds the form for inspection.
json channel_spec_to_json(const GaussianChannelSpec& spec);
GaussianChannelSpec channel_spec_from_json(const json& j);

// Probe-record files: object {"k", "label", "sigma", "seed", "records"}.
// A bare top-level array of records is accepted on read for hand-written
// fixtures; the header then defaults to k inferred, sigma 0, seed 0.
struct RecordsFile {
    int k = 1;
    std::string label;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<ProbeRecord> records;
};

json records_to_json(const RecordsFile& file);
RecordsFile records_from_json(const json& j);

json record_to_json(const ProbeRecord& record);
ProbeRecord record_from_json(const json& j);

// A probe is [re, im] for one mode or an array of such pairs for several.
std::vector<Vec> probes_from_json(const json& j);
json probes_to_json(const std::vector<Vec>& probes);

// Candidate file for probe-set ranking: array of probe sets, each either a
// bare probe array or {"label", "probes"}.
struct ProbeSetCandidate {
    std::string label;
    std::vector<Vec> probes;
};
std::vector<ProbeSetCandidate> candidates_from_json(const json& j);

json reconstruction_to_json(const ChoiReconstruction& rec);
ChoiReconstruction reconstruction_from_json(const json& j);

// Q-surface sampling rectangle: res x res points on
// [cx - hw, cx + hw] x [cy - hw, cy + hw], re outer loop, im inner.
struct GridSpec {
    double cx = 0.0;
    double cy = 0.0;
    double halfwidth = 1.5;
    int res = 5;
};

// CSV with header re_z,im_z,q_value; %.17g throughout so reruns are
// byte-identical.
std::string q_grid_csv(const std::function<double(cxd)>& qfunc,
                       const GridSpec& grid);

// File helpers; both throw ParseError with the path on failure.
json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& content);

}  // namespace qptomo
