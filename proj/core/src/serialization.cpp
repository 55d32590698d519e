#include "relu_landscape/serialization.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace relu_landscape {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) { return json(v); }

Vec vec_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw std::runtime_error("expected an array at " + where);
    Vec v;
    for (const auto& e : j) {
        if (!e.is_number()) throw std::runtime_error("expected numbers at " + where);
        v.push_back(e.get<double>());
    }
    return v;
}

const json& require(const json& j, const std::string& key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error("missing key \"" + key + "\" in " + where);
    return *it;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("JSON parse error: ") + e.what());
    }
}

json background_to_json(const AffineFunc& a) {
    return json{{"linear", vec_to_json(a.linear)}, {"const", a.constant}};
}

AffineFunc background_from_json(const json& j, const std::string& where) {
    AffineFunc a;
    a.linear = vec_from_json(require(j, "linear", where), where + ".linear");
    a.constant = require(j, "const", where).get<double>();
    return a;
}

}  // namespace

std::string to_json(const NetworkConfig& w) {
    json j;
    j["d_in"] = w.d_in();
    j["d"] = w.width();
    j["w1"] = json::array();
    for (const Vec& col : w.w1) j["w1"].push_back(vec_to_json(col));
    j["w2"] = vec_to_json(w.w2);
    j["bias"] = vec_to_json(w.bias);
    return j.dump(2) + "\n";
}

NetworkConfig network_from_json(const std::string& text) {
    const json j = parse(text);
    NetworkConfig w;
    const auto d_in = require(j, "d_in", "network").get<std::size_t>();
    const auto d = require(j, "d", "network").get<std::size_t>();
    for (const auto& col : require(j, "w1", "network"))
        w.w1.push_back(vec_from_json(col, "network.w1"));
    w.w2 = vec_from_json(require(j, "w2", "network"), "network.w2");
    w.bias = vec_from_json(require(j, "bias", "network"), "network.bias");
    if (w.w1.size() != d + 1 || w.w2.size() != d || w.bias.size() != d + 1)
        throw std::runtime_error("network: shapes disagree with d");
    for (const Vec& col : w.w1)
        if (col.size() != d_in) throw std::runtime_error("network: w1 column size != d_in");
    validate(w);
    return w;
}

std::string to_json(const EffectiveTuple& t) {
    json j;
    j["neurons"] = json::array();
    for (const EffectiveNeuron& n : t.neurons)
        j["neurons"].push_back(
            json{{"normal", vec_to_json(n.normal)}, {"offset", n.offset}, {"kink", n.kink}});
    j["background"] = background_to_json(t.background);
    return j.dump(2) + "\n";
}

EffectiveTuple tuple_from_json(const std::string& text) {
    const json j = parse(text);
    EffectiveTuple t;
    t.background = background_from_json(require(j, "background", "tuple"), "tuple.background");
    for (const auto& n : require(j, "neurons", "tuple")) {
        EffectiveNeuron neuron;
        neuron.normal = vec_from_json(require(n, "normal", "tuple.neuron"), "tuple.neuron.normal");
        neuron.offset = require(n, "offset", "tuple.neuron").get<double>();
        neuron.kink = require(n, "kink", "tuple.neuron").get<double>();
        t.neurons.push_back(std::move(neuron));
    }
    validate(t);
    return t;
}

std::string to_json(const GeneralizedResponse& r) {
    json j;
    j["background"] = background_to_json(r.background);
    j["terms"] = json::array();
    for (const ResponseTerm& t : r.terms)
        j["terms"].push_back(json{{"normal", vec_to_json(t.halfspace.normal)},
                                  {"offset", t.halfspace.offset},
                                  {"delta", vec_to_json(t.delta)},
                                  {"intercept", t.intercept},
                                  {"multiplicity", t.multiplicity}});
    return j.dump(2) + "\n";
}

GeneralizedResponse genresponse_from_json(const std::string& text) {
    const json j = parse(text);
    GeneralizedResponse r;
    r.background =
        background_from_json(require(j, "background", "response"), "response.background");
    for (const auto& t : require(j, "terms", "response")) {
        ResponseTerm term;
        term.halfspace.normal =
            vec_from_json(require(t, "normal", "response.term"), "response.term.normal");
        term.halfspace.offset = require(t, "offset", "response.term").get<double>();
        term.delta = vec_from_json(require(t, "delta", "response.term"), "response.term.delta");
        term.intercept = require(t, "intercept", "response.term").get<double>();
        term.multiplicity = require(t, "multiplicity", "response.term").get<int>();
        r.terms.push_back(std::move(term));
    }
    validate(r);
    return r;
}

ProblemInstance instance_from_json(const std::string& text) {
    const json j = parse(text);
    ProblemInstance inst;
    const auto d_in = require(j, "d_in", "instance").get<std::size_t>();
    const json& box = require(j, "box", "instance");
    inst.box.lo = vec_from_json(require(box, "lo", "instance.box"), "instance.box.lo");
    inst.box.hi = vec_from_json(require(box, "hi", "instance.box"), "instance.box.hi");
    if (inst.box.lo.size() != d_in || inst.box.hi.size() != d_in)
        throw std::runtime_error("instance: box dimension != d_in");
    if (j.contains("label")) inst.label = j["label"].get<std::string>();

    const json& density = require(j, "density", "instance");
    const auto density_id = require(density, "id", "instance.density").get<std::string>();
    if (density_id == "uniform_box") {
        inst.density_fn = density_uniform_box();
    } else if (density_id == "three_disks_ex45") {
        if (d_in != 2) throw std::runtime_error("instance: three_disks_ex45 needs d_in = 2");
        inst.density_fn = density_three_disks_ex45();
    } else if (density_id == "uniform_interval_ex48") {
        if (d_in != 1) throw std::runtime_error("instance: uniform_interval_ex48 needs d_in = 1");
        inst.density_fn = density_uniform_interval_ex48();
    } else {
        throw std::runtime_error("instance: unknown density id \"" + density_id + "\"");
    }

    if (j.contains("target")) {
        const json& target = j["target"];
        const auto target_id = require(target, "id", "instance.target").get<std::string>();
        if (target_id == "tent") {
            if (d_in != 1) throw std::runtime_error("instance: tent target needs d_in = 1");
            inst.target = target_tent();
        } else if (target_id == "plateau_ex45") {
            if (d_in != 2) throw std::runtime_error("instance: plateau_ex45 needs d_in = 2");
            inst.target = target_plateau_ex45();
        } else if (target_id == "affine") {
            Vec slope = vec_from_json(require(target, "a", "instance.target"), "instance.target.a");
            if (slope.size() != d_in) throw std::runtime_error("instance: affine slope size");
            inst.target = target_affine(std::move(slope),
                                        require(target, "b", "instance.target").get<double>());
        } else if (target_id == "zero") {
            inst.target = target_zero();
        } else {
            throw std::runtime_error("instance: unknown target id \"" + target_id + "\"");
        }
    }

    const json& loss = require(j, "loss", "instance");
    const auto loss_id = require(loss, "id", "instance.loss").get<std::string>();
    if (loss_id != "squared" && loss_id != "pnorm" && loss_id != "abs")
        throw std::runtime_error("instance: unknown loss id \"" + loss_id + "\"");
    if (!inst.target)
        throw std::runtime_error("instance: loss \"" + loss_id + "\" needs a target");
    if (loss_id == "squared") {
        inst.loss = loss_squared(inst.target);
    } else if (loss_id == "abs") {
        inst.loss = loss_abs(inst.target);
    } else {
        inst.loss = loss_pnorm(inst.target, require(loss, "p", "instance.loss").get<double>());
    }
    validate(inst);
    return inst;
}

LoadedResponse response_from_json(const std::string& text) {
    const json j = parse(text);
    if (j.contains("w1")) return network_from_json(text);
    if (j.contains("terms")) return genresponse_from_json(text);
    throw std::runtime_error("response file: expected \"w1\" (network) or \"terms\" (response)");
}

double eval_loaded(const LoadedResponse& r, const Vec& x) {
    if (const auto* w = std::get_if<NetworkConfig>(&r)) return eval_response(*w, x);
    return eval_genresponse(std::get<GeneralizedResponse>(r), x);
}

std::size_t loaded_d_in(const LoadedResponse& r) {
    if (const auto* w = std::get_if<NetworkConfig>(&r)) return w->d_in();
    return std::get<GeneralizedResponse>(r).d_in();
}

std::string format_double(double v) {
    json j = v;
    return j.dump();
}

std::string train_record_csv(const TrainRecord& rec) {
    std::ostringstream out;
    out << "iter,err,norm_inf,step_size\n";
    for (const TrainStep& s : rec.steps)
        out << s.iter << ',' << format_double(s.err) << ',' << format_double(s.norm_inf) << ','
            << format_double(s.step_size) << '\n';
    return out.str();
}

std::string train_metadata_json(const TrainConfig& config, const QuadratureGrid& grid,
                                const TrainRecord& rec) {
    json j;
    j["seed"] = config.seed;
    j["schedule"] = {{"base", config.schedule.base}, {"decay", config.schedule.decay}};
    j["budget"] = config.budget;
    j["diverge_norm_threshold"] = config.diverge_norm_threshold;
    j["diverge_window"] = config.diverge_window;
    j["grid"] = {{"scheme", grid.scheme == QuadratureScheme::tensor_midpoint ? "tensor-midpoint"
                                                                             : "quasi-random"},
                 {"nodes", grid.size()}};
    switch (rec.verdict) {
        case Verdict::converged:
            j["verdict"] = "converged";
            break;
        case Verdict::norm_diverging:
            j["verdict"] = "norm-diverging";
            break;
        case Verdict::budget_exhausted:
            j["verdict"] = "budget-exhausted";
            break;
    }
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace relu_landscape
