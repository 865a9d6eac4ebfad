#include "injectcheck/serialize.hpp"

#include "injectcheck/errors.hpp"

namespace injectcheck {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix JSON must be a nonempty array", 0, 0);
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ParseError("matrix JSON rows must be arrays", 0, 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError("matrix JSON has ragged rows", i + 1, 0);
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
    validate_matrix(m, "matrix JSON");
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("vector JSON must be an array", 0, 0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    validate_vector(v, "vector JSON");
    return v;
}

json certificate_to_json(const InjectivityCertificate& cert) {
    json j;
    j["verdict"] = to_string(cert.verdict);
    j["wedge_count"] = cert.wedge_count;
    j["method"] = cert.method;
    if (!cert.note.empty()) j["note"] = cert.note;
    if (cert.failing_witness) j["failing_witness"] = vector_to_json(*cert.failing_witness);
    if (cert.collision) {
        j["collision"] = {{"x1", vector_to_json(cert.collision->first)},
                          {"x2", vector_to_json(cert.collision->second)}};
    }
    if (cert.evidence) {
        json table = json::array();
        for (const WedgeRankRecord& rec : *cert.evidence) {
            json signs = json::array();
            for (Eigen::Index i = 0; i < rec.sign_pattern.size(); ++i) signs.push_back(rec.sign_pattern[i]);
            table.push_back({{"sign_pattern", std::move(signs)}, {"rank", rec.rank}});
        }
        j["wedge_ranks"] = std::move(table);
    }
    return j;
}

json stability_to_json(const StabilityReport& report) {
    json j;
    j["m"] = report.m;
    j["n"] = report.n;
    if (report.c_exact) j["c_exact"] = *report.c_exact;
    if (report.c_sampled) j["c_sampled"] = *report.c_sampled;
    if (report.empirical_min_ratio) j["empirical_min_ratio"] = *report.empirical_min_ratio;
    if (report.argmin_pattern) {
        json signs = json::array();
        for (Eigen::Index i = 0; i < report.argmin_pattern->size(); ++i)
            signs.push_back((*report.argmin_pattern)[i]);
        j["argmin_wedge"] = std::move(signs);
    }
    return j;
}

namespace {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::LeakyRelu: return "leaky_relu";
        case Activation::Identity: return "identity";
    }
    return "relu";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::Relu;
    if (name == "leaky_relu") return Activation::LeakyRelu;
    if (name == "identity") return Activation::Identity;
    throw ParseError("unknown activation '" + name + "'", 0, 0);
}

}  // namespace

json layer_to_json(const DenseLayer& layer) {
    json j;
    j["weight"] = matrix_to_json(layer.weight);
    if (layer.bias.size() != 0) j["bias"] = vector_to_json(layer.bias);
    j["activation"] = activation_name(layer.activation);
    if (layer.activation == Activation::LeakyRelu) j["alpha"] = layer.leaky_alpha;
    return j;
}

DenseLayer layer_from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object() || !j.contains("weight")) throw ParseError("layer JSON needs a weight", 0, 0);
    DenseLayer layer;
    const json& w = j.at("weight");
    if (w.is_string()) {
        layer.weight = read_matrix_csv_file(base_dir + "/" + w.get<std::string>());
    } else {
        layer.weight = matrix_from_json(w);
    }
    if (j.contains("bias")) layer.bias = vector_from_json(j.at("bias"));
    layer.activation = j.contains("activation")
                           ? activation_from_name(j.at("activation").get<std::string>())
                           : Activation::Relu;
    if (j.contains("alpha")) layer.leaky_alpha = j.at("alpha").get<double>();
    validate_layer(layer);
    return layer;
}

json network_to_json(const ReluNetwork& net) {
    json j;
    json layers = json::array();
    for (const DenseLayer& layer : net.layers) layers.push_back(layer_to_json(layer));
    j["layers"] = std::move(layers);
    if (net.final_linear) j["final_linear"] = matrix_to_json(*net.final_linear);
    return j;
}

ReluNetwork network_from_json(const json& j, const std::string& base_dir) {
    ReluNetwork net;
    const json& layers = j.is_array() ? j : j.at("layers");
    if (!layers.is_array() || layers.empty()) throw ParseError("network JSON needs layers", 0, 0);
    for (const json& lj : layers) net.layers.push_back(layer_from_json(lj, base_dir));
    if (j.is_object() && j.contains("final_linear"))
        net.final_linear = matrix_from_json(j.at("final_linear"));
    validate_network(net);
    return net;
}

json conv_spec_to_json(const ConvSpec& spec) {
    json j;
    json kernels = json::array();
    for (const Kernel& k : spec.kernels) {
        json shape = json::array();
        for (int v : k.width) shape.push_back(v);
        kernels.push_back({{"shape", std::move(shape)}, {"values", vector_to_json(k.values)}});
    }
    j["kernels"] = std::move(kernels);
    json shape = json::array();
    for (int v : spec.signal_shape) shape.push_back(v);
    j["signal_shape"] = std::move(shape);
    j["boundary"] = spec.boundary == BoundaryMode::Periodic ? "periodic" : "zero_padded";
    return j;
}

ConvSpec conv_spec_from_json(const json& j) {
    ConvSpec spec;
    if (!j.contains("kernels")) throw ParseError("conv JSON needs kernels", 0, 0);
    for (const json& kj : j.at("kernels")) {
        Kernel k;
        for (const json& v : kj.at("shape")) k.width.push_back(v.get<int>());
        k.values = vector_from_json(kj.at("values"));
        validate_kernel(k);
        spec.kernels.push_back(std::move(k));
    }
    if (j.contains("signal_shape"))
        for (const json& v : j.at("signal_shape")) spec.signal_shape.push_back(v.get<int>());
    if (j.contains("boundary")) {
        const std::string b = j.at("boundary").get<std::string>();
        if (b == "periodic")
            spec.boundary = BoundaryMode::Periodic;
        else if (b == "zero_padded")
            spec.boundary = BoundaryMode::ZeroPadded;
        else
            throw ParseError("unknown boundary '" + b + "'", 0, 0);
    }
    return spec;
}

}  // namespace injectcheck
