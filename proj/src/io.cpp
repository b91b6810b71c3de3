#include "qptomo/io.hpp"

#include <cstdio>
#include <fstream>

#include "qptomo/errors.hpp"

namespace qptomo {

namespace {

const json& need(const json& j, const char* key) {
    if (!j.is_object())
        throw ParseError(std::string("expected an object holding '") + key +
                         "'");
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

double as_number(const json& j, const char* what) {
    if (!j.is_number())
        throw ParseError(std::string("field '") + what + "' must be a number");
    return j.get<double>();
}

}  // namespace

json complex_to_json(cxd z) { return json::array({z.real(), z.imag()}); }

cxd complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
        !j[1].is_number())
        throw ParseError("complex values must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(complex_to_json(v(i)));
    return out;
}

Vec vector_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("vector must be an array");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

json matrix_to_json(const Mat& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_to_json(m(r, c)));
        out.push_back(row);
    }
    return out;
}

Mat matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ParseError("matrix must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Mat m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c]);
    }
    return m;
}

json qform_to_json(const GaussianQForm& form) {
    json j;
    j["n_modes"] = form.n_modes();
    if (form.partition())
        j["partition"] =
            json::array({form.partition()->a_modes, form.partition()->b_modes});
    else
        j["partition"] = nullptr;
    j["c0"] = form.c0();
    j["gamma"] = vector_to_json(form.gamma());
    j["X"] = matrix_to_json(form.X());
    j["Y"] = matrix_to_json(form.Y());
    return j;
}

GaussianQForm qform_from_json(const json& j) {
    const double c0 = as_number(need(j, "c0"), "c0");
    const Vec gamma = vector_from_json(need(j, "gamma"));
    const Mat X = matrix_from_json(need(j, "X"));
    const Mat Y = matrix_from_json(need(j, "Y"));
    std::optional<ChoiPartition> part;
    if (j.contains("partition") && !j["partition"].is_null()) {
        const json& p = j["partition"];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
            !p[1].is_number_integer())
            throw ParseError("field 'partition' must be [a_modes, b_modes]");
        part = ChoiPartition{p[0].get<int>(), p[1].get<int>()};
    }
    try {
        return GaussianQForm(c0, gamma, X, Y, part);
    } catch (const Error& e) {
        throw ParseError(std::string("form rejected: ") + e.what());
    }
}

namespace {

std::string kind_name(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Identity: return "identity";
        case ChannelKind::BeamSplitter: return "bs";
        case ChannelKind::ThermalNoise: return "thermal";
        case ChannelKind::PhaseShift: return "phase";
        case ChannelKind::Gaussian: return "gaussian";
    }
    throw ParseError("unknown channel kind");
}

}  // namespace

json channel_spec_to_json(const GaussianChannelSpec& spec) {
    json j;
    j["kind"] = kind_name(spec.kind);
    if (!spec.label.empty()) j["label"] = spec.label;
    switch (spec.kind) {
        case ChannelKind::Identity: j["k"] = spec.k; break;
        case ChannelKind::BeamSplitter: j["theta"] = spec.param; break;
        case ChannelKind::ThermalNoise: j["nbar"] = spec.param; break;
        case ChannelKind::PhaseShift: j["phi"] = spec.param; break;
        case ChannelKind::Gaussian: j["k"] = spec.k; break;
    }
    j["choi"] = qform_to_json(spec.choi);
    return j;
}

GaussianChannelSpec channel_spec_from_json(const json& j) {
    const json& kj = need(j, "kind");
    if (!kj.is_string()) throw ParseError("field 'kind' must be a string");
    const std::string kind = kj.get<std::string>();
    const std::string label = j.value("label", kind);
    try {
        if (kind == "identity") {
            int k = 1;
            if (j.contains("k")) {
                if (!j["k"].is_number_integer())
                    throw ParseError("field 'k' must be an integer");
                k = j["k"].get<int>();
            }
            GaussianChannelSpec spec = identity_channel(k);
            spec.label = label;
            return spec;
        }
        if (kind == "bs") {
            GaussianChannelSpec spec =
                bs_channel(as_number(need(j, "theta"), "theta"));
            spec.label = label;
            return spec;
        }
        if (kind == "thermal") {
            GaussianChannelSpec spec =
                thermal_noise_channel(as_number(need(j, "nbar"), "nbar"));
            spec.label = label;
            return spec;
        }
        if (kind == "phase") {
            GaussianChannelSpec spec =
                phase_channel(as_number(need(j, "phi"), "phi"));
            spec.label = label;
            return spec;
        }
        if (kind == "gaussian") {
            GaussianQForm form = qform_from_json(need(j, "choi"));
            if (!form.partition())
                throw ParseError("field 'choi' needs a two-sided partition");
            const int k = form.partition()->a_modes;
            return {ChannelKind::Gaussian, 0.0, k, label, std::move(form)};
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("channel rejected: ") + e.what());
    }
    throw ParseError("field 'kind' must be one of identity/bs/thermal/phase/"
                     "gaussian");
}

json record_to_json(const ProbeRecord& record) {
    json j;
    j["alpha"] = vector_to_json(record.alpha);
    j["d"] = vector_to_json(record.d);
    j["c"] = record.c;
    j["X_bb"] = matrix_to_json(record.X_bb);
    j["Y_bb"] = matrix_to_json(record.Y_bb);
    return j;
}

ProbeRecord record_from_json(const json& j) {
    ProbeRecord r;
    r.alpha = vector_from_json(need(j, "alpha"));
    r.d = vector_from_json(need(j, "d"));
    r.c = as_number(need(j, "c"), "c");
    r.X_bb = matrix_from_json(need(j, "X_bb"));
    r.Y_bb = matrix_from_json(need(j, "Y_bb"));
    return r;
}

json records_to_json(const RecordsFile& file) {
    json j;
    j["k"] = file.k;
    j["label"] = file.label;
    j["sigma"] = file.sigma;
    j["seed"] = file.seed;
    json arr = json::array();
    for (const ProbeRecord& r : file.records) arr.push_back(record_to_json(r));
    j["records"] = arr;
    return j;
}

RecordsFile records_from_json(const json& j) {
    RecordsFile file;
    bool have_k = false;
    const json* arr = nullptr;
    if (j.is_array()) {
        arr = &j;  // bare array accepted for hand-written fixtures
    } else {
        arr = &need(j, "records");
        if (j.contains("k")) {
            if (!j["k"].is_number_integer())
                throw ParseError("field 'k' must be an integer");
            file.k = j["k"].get<int>();
            have_k = true;
        }
        file.label = j.value("label", "");
        file.sigma = j.value("sigma", 0.0);
        file.seed = j.value("seed", std::uint64_t{0});
    }
    if (!arr->is_array()) throw ParseError("field 'records' must be an array");
    for (const json& rj : *arr) file.records.push_back(record_from_json(rj));
    if (!have_k && !file.records.empty())
        file.k = static_cast<int>(file.records.front().alpha.size());
    return file;
}

std::vector<Vec> probes_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("probe list must be an array");
    std::vector<Vec> probes;
    for (const json& pj : j) {
        if (!pj.is_array() || pj.empty())
            throw ParseError("each probe must be [re, im] or a pair array");
        if (pj[0].is_number()) {
            probes.push_back(Vec::Constant(1, complex_from_json(pj)));
        } else {
            Vec a(pj.size());
            for (std::size_t m = 0; m < pj.size(); ++m)
                a(static_cast<Eigen::Index>(m)) = complex_from_json(pj[m]);
            probes.push_back(a);
        }
    }
    return probes;
}

json probes_to_json(const std::vector<Vec>& probes) {
    json out = json::array();
    for (const Vec& a : probes) {
        if (a.size() == 1) {
            out.push_back(complex_to_json(a(0)));
        } else {
            json pj = json::array();
            for (Eigen::Index m = 0; m < a.size(); ++m)
                pj.push_back(complex_to_json(a(m)));
            out.push_back(pj);
        }
    }
    return out;
}

std::vector<ProbeSetCandidate> candidates_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ParseError("candidate file must be a non-empty array of sets");
    std::vector<ProbeSetCandidate> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        ProbeSetCandidate c;
        if (j[i].is_object()) {
            c.label = j[i].value("label", "");
            c.probes = probes_from_json(need(j[i], "probes"));
        } else {
            c.probes = probes_from_json(j[i]);
        }
        if (c.label.empty()) c.label = "set-" + std::to_string(i);
        out.push_back(std::move(c));
    }
    return out;
}

json reconstruction_to_json(const ChoiReconstruction& rec) {
    json j;
    j["choi"] = qform_to_json(rec.choi);
    j["residual_K"] = rec.residual_K;
    j["residual_J"] = rec.residual_J;
    j["cond_K"] = rec.cond_K;
    j["cond_J"] = rec.cond_J;
    j["quadratic_consistency"] = rec.quadratic_consistency;
    j["conjugate_deviation"] = rec.conjugate_deviation;
    j["tp_assumed"] = rec.tp_assumed;
    return j;
}

ChoiReconstruction reconstruction_from_json(const json& j) {
    ChoiReconstruction rec{qform_from_json(need(j, "choi"))};
    rec.residual_K = as_number(need(j, "residual_K"), "residual_K");
    rec.residual_J = as_number(need(j, "residual_J"), "residual_J");
    rec.cond_K = as_number(need(j, "cond_K"), "cond_K");
    rec.cond_J = as_number(need(j, "cond_J"), "cond_J");
    rec.quadratic_consistency =
        as_number(need(j, "quadratic_consistency"), "quadratic_consistency");
    rec.conjugate_deviation =
        as_number(need(j, "conjugate_deviation"), "conjugate_deviation");
    const json& tp = need(j, "tp_assumed");
    if (!tp.is_boolean()) throw ParseError("field 'tp_assumed' must be a bool");
    rec.tp_assumed = tp.get<bool>();
    return rec;
}

std::string q_grid_csv(const std::function<double(cxd)>& qfunc,
                       const GridSpec& grid) {
    if (grid.res < 2) throw DomainError("grid resolution must be >= 2");
    if (grid.halfwidth <= 0.0) throw DomainError("grid half-width must be > 0");
    std::string out = "re_z,im_z,q_value\n";
    char buf[128];
    for (int i = 0; i < grid.res; ++i) {
        const double re =
            grid.cx - grid.halfwidth +
            2.0 * grid.halfwidth * i / static_cast<double>(grid.res - 1);
        for (int jj = 0; jj < grid.res; ++jj) {
            const double im =
                grid.cy - grid.halfwidth +
                2.0 * grid.halfwidth * jj / static_cast<double>(grid.res - 1);
            const double q = qfunc(cxd{re, im});
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", re, im, q);
            out += buf;
        }
    }
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
}

void save_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
    if (!out) throw ParseError("write failed: " + path);
}

}  // namespace qptomo
