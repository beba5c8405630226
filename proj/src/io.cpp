#include "nanoesn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nanoesn {

namespace {

std::string num17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_vector(std::ostringstream& os, const Eigen::VectorXd& v)
{
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << num17(v[i]);
    os << ']';
}

void write_matrix(std::ostringstream& os, const Eigen::MatrixXd& m)
{
    os << '[';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << (r ? "," : "");
        write_vector(os, m.row(r).transpose());
    }
    os << ']';
}

Eigen::MatrixXd read_matrix(const nlohmann::json& j, const char* what)
{
    if (!j.is_array())
        throw std::runtime_error(std::string("network JSON: '") + what + "' must be an array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::runtime_error(std::string("network JSON: ragged '") + what + "'");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out)
{
    if (j.contains(key) && !j.at(key).is_null())
        out = j.at(key).get<T>();
}

} // namespace

nlohmann::json to_json(const NetworkConfig& c)
{
    return {{"N", c.n_nodes},
            {"v", c.input_coeff},
            {"lambda", c.spectral_radius},
            {"delta_in", c.delta_in},
            {"delta_res", c.delta_res},
            {"delta_out", c.delta_out},
            {"weight_pattern", std::string(to_string(c.weight_pattern))},
            {"transfer", std::string(to_string(c.transfer))},
            {"input_wiring", std::string(to_string(c.input_wiring))},
            {"n_inputs", c.n_inputs},
            {"n_outputs", c.n_outputs},
            {"seed", c.seed}};
}

std::string network_to_json(const Network& net, std::span<const Readout> readouts)
{
    const NetworkConfig& c = net.config;
    std::ostringstream os;
    os << "{\"config\":{\"N\":" << c.n_nodes << ",\"v\":" << num17(c.input_coeff)
       << ",\"lambda\":" << num17(c.spectral_radius) << ",\"delta_in\":" << num17(c.delta_in)
       << ",\"delta_res\":" << num17(c.delta_res) << ",\"delta_out\":" << num17(c.delta_out)
       << ",\"weight_pattern\":\"" << to_string(c.weight_pattern) << "\",\"transfer\":\""
       << to_string(c.transfer) << "\",\"input_wiring\":\"" << to_string(c.input_wiring)
       << "\",\"n_inputs\":" << c.n_inputs
       << ",\"n_outputs\":" << c.n_outputs << ",\"seed\":" << c.seed << "}";
    os << ",\"w_in\":";
    write_matrix(os, net.w_in.transpose());
    os << ",\"w_res\":";
    write_matrix(os, net.w_res);
    os << ",\"gains\":";
    write_vector(os, net.gains);
    os << ",\"readouts\":[";
    for (std::size_t i = 0; i < readouts.size(); ++i) {
        const Readout& r = readouts[i];
        os << (i ? "," : "") << "{\"w_out\":";
        write_matrix(os, r.w_out);
        os << ",\"tau\":" << r.tau << ",\"theta\":" << num17(r.theta) << ",\"gamma\":" << num17(r.gamma)
           << ",\"sign_mode\":\"" << to_string(r.sign_mode) << "\",\"visible_mask\":[";
        for (std::size_t k = 0; k < r.visible_mask.size(); ++k)
            os << (k ? "," : "") << (r.visible_mask[k] ? 1 : 0);
        os << "]}";
    }
    os << "]}";
    return os.str();
}

SavedNetwork network_from_json(std::string_view text)
{
    const nlohmann::json j = nlohmann::json::parse(text);
    SavedNetwork saved;
    Network& net = saved.network;
    net.config = network_config_from_json(j.at("config"), NetworkConfig{});
    net.w_in = read_matrix(j.at("w_in"), "w_in").transpose();
    net.w_res = read_matrix(j.at("w_res"), "w_res");
    const auto& gains = j.at("gains");
    net.gains.resize(static_cast<Eigen::Index>(gains.size()));
    for (std::size_t i = 0; i < gains.size(); ++i)
        net.gains[static_cast<Eigen::Index>(i)] = gains[i].get<double>();

    const Eigen::Index n = net.config.n_nodes;
    if (net.w_res.rows() != n || net.w_res.cols() != n || net.w_in.rows() != n ||
        net.w_in.cols() != net.config.n_inputs || net.gains.size() != n)
        throw std::runtime_error("network JSON: array shapes disagree with config");
    net.state = Eigen::VectorXd::Zero(n);

    if (j.contains("readouts"))
        for (const auto& rj : j.at("readouts")) {
            Readout r;
            r.w_out = read_matrix(rj.at("w_out"), "w_out");
            maybe(rj, "tau", r.tau);
            maybe(rj, "theta", r.theta);
            maybe(rj, "gamma", r.gamma);
            if (rj.contains("sign_mode"))
                r.sign_mode = parse_ridge_sign(rj.at("sign_mode").get<std::string>());
            if (rj.contains("visible_mask")) {
                for (const auto& b : rj.at("visible_mask"))
                    r.visible_mask.push_back(b.get<int>() != 0);
            } else {
                r.visible_mask = full_mask(n);
            }
            if (r.w_out.cols() != n + 1 || static_cast<Eigen::Index>(r.visible_mask.size()) != n)
                throw std::runtime_error("network JSON: readout shape disagrees with config");
            saved.readouts.push_back(std::move(r));
        }
    return saved;
}

NetworkConfig network_config_from_json(const nlohmann::json& j, NetworkConfig c)
{
    maybe(j, "N", c.n_nodes);
    maybe(j, "v", c.input_coeff);
    maybe(j, "lambda", c.spectral_radius);
    maybe(j, "delta_in", c.delta_in);
    maybe(j, "delta_res", c.delta_res);
    maybe(j, "delta_out", c.delta_out);
    if (j.contains("weight_pattern"))
        c.weight_pattern = parse_weight_pattern(j.at("weight_pattern").get<std::string>());
    if (j.contains("transfer"))
        c.transfer = parse_transfer(j.at("transfer").get<std::string>());
    if (j.contains("input_wiring"))
        c.input_wiring = parse_input_wiring(j.at("input_wiring").get<std::string>());
    maybe(j, "n_inputs", c.n_inputs);
    maybe(j, "n_outputs", c.n_outputs);
    maybe(j, "seed", c.seed);
    return c;
}

TaskSpec task_from_json(const nlohmann::json& j, TaskSpec t)
{
    if (j.contains("kind"))
        t.kind = parse_task_kind(j.at("kind").get<std::string>());
    maybe(j, "k", t.k);
    maybe(j, "T", t.length);
    maybe(j, "p", t.p);
    maybe(j, "seed", t.seed);
    return t;
}

ReadoutParams readout_params_from_json(const nlohmann::json& j, ReadoutParams r)
{
    maybe(j, "gamma", r.gamma);
    maybe(j, "tau", r.tau);
    maybe(j, "theta", r.theta);
    if (j.contains("sign_mode"))
        r.sign_mode = parse_ridge_sign(j.at("sign_mode").get<std::string>());
    return r;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg;
    TrialSetup& s = cfg.setup;
    if (j.contains("network"))
        s.network = network_config_from_json(j.at("network"), s.network);
    if (j.contains("task"))
        s.task = task_from_json(j.at("task"), s.task);
    if (j.contains("readout"))
        s.readout = readout_params_from_json(j.at("readout"), s.readout);
    maybe(j, "washout", s.washout);
    if (j.contains("variation")) {
        const auto& v = j.at("variation");
        if (v.is_null() || (v.is_boolean() && !v.get<bool>())) {
            s.variation.reset();
        } else {
            VariationModel m = s.variation.value_or(VariationModel{});
            maybe(v, "n", m.n);
            maybe(v, "sigma", m.sigma);
            maybe(v, "seed", m.seed);
            s.variation = m;
        }
    }
    maybe(j, "trials", cfg.trials);
    maybe(j, "master_seed", cfg.master_seed);
    if (j.contains("grid"))
        for (const auto& a : j.at("grid"))
            cfg.grid.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<double>>()});
    if (j.contains("fault")) {
        const auto& f = j.at("fault");
        maybe(f, "t_fail", cfg.fault.t_fail);
        maybe(f, "repeats", cfg.fault.repeats);
        maybe(f, "seed", cfg.fault.seed);
        maybe(f, "aux_k", cfg.fault.aux_k);
        maybe(f, "debounce", cfg.fault.debounce);
        if (f.contains("aux_task"))
            cfg.fault.aux_task = parse_task_kind(f.at("aux_task").get<std::string>());
        if (f.contains("m")) {
            const auto& m = f.at("m");
            cfg.fault.m = m.is_array() ? m.get<std::vector<int>>() : std::vector<int>{m.get<int>()};
        }
    }
    s.network.validate();
    s.task.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path + "'");
    return experiment_config_from_json(nlohmann::json::parse(in));
}

} // namespace nanoesn
